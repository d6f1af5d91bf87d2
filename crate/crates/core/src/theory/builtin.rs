use std::fmt;
use std::str::FromStr;

use super::{parse_theory, TheoryError, TheoryPresentation};

/// The theories of graphs and their relatives that ship with the library.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BuiltinTheory {
    /// Discrete category on one object: sets.
    One,
    /// Discrete category on two objects: pairs of sets.
    Two,
    Graph,
    SGraph,
    RGraph,
    SRGraph,
    BGraph,
    /// Semi-simplicial sets truncated to dimension two.
    Delta2,
    DDS,
    ASet,
    VGraph,
}

impl BuiltinTheory {
    pub const ALL: [BuiltinTheory; 11] = [
        BuiltinTheory::One,
        BuiltinTheory::Two,
        BuiltinTheory::Graph,
        BuiltinTheory::SGraph,
        BuiltinTheory::RGraph,
        BuiltinTheory::SRGraph,
        BuiltinTheory::BGraph,
        BuiltinTheory::Delta2,
        BuiltinTheory::DDS,
        BuiltinTheory::ASet,
        BuiltinTheory::VGraph,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinTheory::One => "One",
            BuiltinTheory::Two => "Two",
            BuiltinTheory::Graph => "Graph",
            BuiltinTheory::SGraph => "SGraph",
            BuiltinTheory::RGraph => "RGraph",
            BuiltinTheory::SRGraph => "SRGraph",
            BuiltinTheory::BGraph => "BGraph",
            BuiltinTheory::Delta2 => "Delta2",
            BuiltinTheory::DDS => "DDS",
            BuiltinTheory::ASet => "ASet",
            BuiltinTheory::VGraph => "VGraph",
        }
    }

    fn source(self) -> &'static str {
        match self {
            BuiltinTheory::One => "theory One { ob X }",
            BuiltinTheory::Two => "theory Two { ob X, Y }",
            BuiltinTheory::Graph => {
                "theory Graph {
                   ob E, V
                   hom src: E -> V
                   hom tgt: E -> V
                 }"
            }
            BuiltinTheory::SGraph => {
                "theory SGraph {
                   ob E, V
                   hom src: E -> V
                   hom tgt: E -> V
                   hom inv: E -> E
                   eq inv.inv = id(E)
                   eq inv.src = tgt
                   eq inv.tgt = src
                 }"
            }
            BuiltinTheory::RGraph => {
                "theory RGraph {
                   ob E, V
                   hom src: E -> V
                   hom tgt: E -> V
                   hom refl: V -> E
                   eq refl.src = id(V)
                   eq refl.tgt = id(V)
                 }"
            }
            // Distinguished loops are fixed by the involution.
            BuiltinTheory::SRGraph => {
                "theory SRGraph {
                   ob E, V
                   hom src: E -> V
                   hom tgt: E -> V
                   hom inv: E -> E
                   hom refl: V -> E
                   eq inv.inv = id(E)
                   eq inv.src = tgt
                   eq inv.tgt = src
                   eq refl.src = id(V)
                   eq refl.tgt = id(V)
                   eq refl.inv = refl
                 }"
            }
            BuiltinTheory::BGraph => {
                "theory BGraph {
                   ob U, E, V
                   hom src: E -> U
                   hom tgt: E -> V
                 }"
            }
            BuiltinTheory::Delta2 => {
                "theory Delta2 {
                   ob T, E, V
                   hom e0, e1, e2: T -> E
                   hom v0, v1: E -> V
                   eq e1.v0 = e0.v0
                   eq e2.v0 = e0.v1
                   eq e2.v1 = e1.v1
                 }"
            }
            BuiltinTheory::DDS => "theory DDS { ob X hom T: X -> X }",
            BuiltinTheory::ASet => "theory ASet { ob X, A hom attr: X -> A }",
            BuiltinTheory::VGraph => {
                "theory VGraph {
                   ob E, V, A
                   hom src: E -> V
                   hom tgt: E -> V
                   hom attr: V -> A
                 }"
            }
        }
    }
}

impl fmt::Display for BuiltinTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinTheory {
    type Err = TheoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BuiltinTheory::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| TheoryError::UnknownBuiltin(s.to_string()))
    }
}

pub fn builtin_theory(which: BuiltinTheory) -> TheoryPresentation {
    parse_theory(which.source()).expect("builtin theory sources are valid")
}
