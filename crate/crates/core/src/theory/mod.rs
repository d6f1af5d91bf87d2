//! Finitely presented categories ("theories").
//!
//! A [`TheoryPresentation`] is the name-level data as written in the theory DSL:
//! objects, generating morphisms and path equations. [`Theory`] is the
//! validated, index-resolved form that instances refer to.
//!
//! Composition is diagrammatic: the path `f.g` means "`f`, then `g`".

mod builtin;
mod parse;

use std::collections::HashMap;
use std::fmt;

pub use builtin::{builtin_theory, BuiltinTheory};
pub use parse::parse_theory;

/// Index of an object within a [`Theory`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObId(pub usize);

/// Index of a generating morphism within a [`Theory`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorDecl {
    pub name: String,
    pub dom: String,
    pub cod: String,
}

/// A path of generators starting at `dom`. No steps means the identity on `dom`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub dom: String,
    pub steps: Vec<String>,
}

impl Path {
    pub fn identity(ob: &str) -> Self {
        Path { dom: ob.to_string(), steps: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Path,
    pub rhs: Path,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryPresentation {
    pub name: String,
    pub objects: Vec<String>,
    pub generators: Vec<GeneratorDecl>,
    pub equations: Vec<Equation>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TheoryError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("duplicate object `{0}`")]
    DuplicateObject(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("undeclared object `{name}` in {context}")]
    UndeclaredObject { name: String, context: String },
    #[error("undeclared generator `{name}` in {context}")]
    UndeclaredGenerator { name: String, context: String },
    #[error("path `{path}` in equation `{equation}` is not composable at `{at}`")]
    NotComposable { equation: String, path: String, at: String },
    #[error("equation endpoint mismatch in `{equation}`: {detail}")]
    EndpointMismatch { equation: String, detail: String },
    #[error("unknown builtin theory `{0}`")]
    UnknownBuiltin(String),
}

/// One or more [`TheoryError`]s, one per violated invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoryErrors(pub Vec<TheoryError>);

impl fmt::Display for TheoryErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for TheoryErrors {}

impl From<TheoryError> for TheoryErrors {
    fn from(e: TheoryError) -> Self {
        TheoryErrors(vec![e])
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            write!(f, "id({})", self.dom)
        } else {
            f.write_str(&self.steps.join("."))
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// Checks every presentation invariant, collecting all violations.
pub fn validate_theory(t: &TheoryPresentation) -> Result<(), TheoryErrors> {
    let mut errors = Vec::new();
    let mut objects: HashMap<&str, usize> = HashMap::new();
    for (i, ob) in t.objects.iter().enumerate() {
        if objects.insert(ob.as_str(), i).is_some() {
            errors.push(TheoryError::DuplicateObject(ob.clone()));
        }
    }
    let mut gens: HashMap<&str, &GeneratorDecl> = HashMap::new();
    for g in &t.generators {
        if gens.insert(g.name.as_str(), g).is_some() {
            errors.push(TheoryError::DuplicateGenerator(g.name.clone()));
        }
        for end in [&g.dom, &g.cod] {
            if !objects.contains_key(end.as_str()) {
                errors.push(TheoryError::UndeclaredObject {
                    name: end.clone(),
                    context: format!("generator `{}`", g.name),
                });
            }
        }
    }
    for eq in &t.equations {
        let label = eq.to_string();
        let lhs = path_codomain(&eq.lhs, &objects, &gens, &label, &mut errors);
        let rhs = path_codomain(&eq.rhs, &objects, &gens, &label, &mut errors);
        if let (Some(l), Some(r)) = (lhs, rhs) {
            if eq.lhs.dom != eq.rhs.dom {
                errors.push(TheoryError::EndpointMismatch {
                    equation: label.clone(),
                    detail: format!("domains {} and {}", eq.lhs.dom, eq.rhs.dom),
                });
            }
            if l != r {
                errors.push(TheoryError::EndpointMismatch {
                    equation: label,
                    detail: format!("codomains {l} and {r}"),
                });
            }
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(TheoryErrors(errors))
    }
}

fn path_codomain<'a>(
    path: &'a Path,
    objects: &HashMap<&str, usize>,
    gens: &HashMap<&str, &'a GeneratorDecl>,
    label: &str,
    errors: &mut Vec<TheoryError>,
) -> Option<&'a str> {
    if !objects.contains_key(path.dom.as_str()) {
        errors.push(TheoryError::UndeclaredObject {
            name: path.dom.clone(),
            context: format!("equation `{label}`"),
        });
        return None;
    }
    let mut at: &str = &path.dom;
    for step in &path.steps {
        let Some(g) = gens.get(step.as_str()) else {
            errors.push(TheoryError::UndeclaredGenerator {
                name: step.clone(),
                context: format!("equation `{label}`"),
            });
            return None;
        };
        if g.dom != at {
            errors.push(TheoryError::NotComposable {
                equation: label.to_string(),
                path: path.to_string(),
                at: step.clone(),
            });
            return None;
        }
        at = &g.cod;
    }
    Some(at)
}

impl TheoryPresentation {
    /// Serializes to the theory DSL; [`parse_theory`] inverts this.
    pub fn render(&self) -> String {
        let mut out = format!("theory {} {{\n", self.name);
        if !self.objects.is_empty() {
            out.push_str(&format!("  ob {}\n", self.objects.join(", ")));
        }
        for g in &self.generators {
            out.push_str(&format!("  hom {}: {} -> {}\n", g.name, g.dom, g.cod));
        }
        for eq in &self.equations {
            out.push_str(&format!("  eq {eq}\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// A path resolved against a [`Theory`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedPath {
    pub dom: ObId,
    pub steps: Vec<GenId>,
}

/// A validated theory with name lookups resolved to indices. Immutable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theory {
    presentation: TheoryPresentation,
    ends: Vec<(ObId, ObId)>,
    equations: Vec<(IndexedPath, IndexedPath)>,
}

impl Theory {
    pub fn new(presentation: TheoryPresentation) -> Result<Self, TheoryErrors> {
        validate_theory(&presentation)?;
        let ob = |name: &str| ObId(presentation.objects.iter().position(|o| o == name).unwrap());
        let ends = presentation
            .generators
            .iter()
            .map(|g| (ob(&g.dom), ob(&g.cod)))
            .collect();
        let mut theory = Theory { presentation, ends, equations: Vec::new() };
        let equations = theory
            .presentation
            .equations
            .iter()
            .map(|eq| (theory.resolve(&eq.lhs).unwrap(), theory.resolve(&eq.rhs).unwrap()))
            .collect();
        theory.equations = equations;
        Ok(theory)
    }

    pub fn parse(text: &str) -> Result<Self, TheoryErrors> {
        Theory::new(parse_theory(text)?)
    }

    pub fn builtin(which: BuiltinTheory) -> Self {
        Theory::new(builtin_theory(which)).expect("builtin theories are valid")
    }

    pub fn presentation(&self) -> &TheoryPresentation {
        &self.presentation
    }

    pub fn name(&self) -> &str {
        &self.presentation.name
    }

    pub fn num_objects(&self) -> usize {
        self.presentation.objects.len()
    }

    pub fn num_generators(&self) -> usize {
        self.ends.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObId> {
        (0..self.num_objects()).map(ObId)
    }

    pub fn generators(&self) -> impl Iterator<Item = GenId> {
        (0..self.num_generators()).map(GenId)
    }

    pub fn object_name(&self, ob: ObId) -> &str {
        &self.presentation.objects[ob.0]
    }

    pub fn generator_name(&self, g: GenId) -> &str {
        &self.presentation.generators[g.0].name
    }

    pub fn object(&self, name: &str) -> Option<ObId> {
        self.presentation.objects.iter().position(|o| o == name).map(ObId)
    }

    pub fn generator(&self, name: &str) -> Option<GenId> {
        self.presentation.generators.iter().position(|g| g.name == name).map(GenId)
    }

    pub fn dom(&self, g: GenId) -> ObId {
        self.ends[g.0].0
    }

    pub fn cod(&self, g: GenId) -> ObId {
        self.ends[g.0].1
    }

    pub fn equations(&self) -> &[(IndexedPath, IndexedPath)] {
        &self.equations
    }

    /// Resolves a name-level path, checking composability.
    pub fn resolve(&self, path: &Path) -> Result<IndexedPath, TheoryError> {
        let dom = self.object(&path.dom).ok_or_else(|| TheoryError::UndeclaredObject {
            name: path.dom.clone(),
            context: format!("path `{path}`"),
        })?;
        let mut steps = Vec::with_capacity(path.steps.len());
        let mut at = dom;
        for s in &path.steps {
            let g = self.generator(s).ok_or_else(|| TheoryError::UndeclaredGenerator {
                name: s.clone(),
                context: format!("path `{path}`"),
            })?;
            if self.dom(g) != at {
                return Err(TheoryError::NotComposable {
                    equation: String::new(),
                    path: path.to_string(),
                    at: s.clone(),
                });
            }
            at = self.cod(g);
            steps.push(g);
        }
        Ok(IndexedPath { dom, steps })
    }

    pub fn path_cod(&self, path: &IndexedPath) -> ObId {
        path.steps.last().map_or(path.dom, |g| self.cod(*g))
    }

    pub fn render_path(&self, path: &IndexedPath) -> String {
        if path.steps.is_empty() {
            format!("id({})", self.object_name(path.dom))
        } else {
            path.steps
                .iter()
                .map(|g| self.generator_name(*g))
                .collect::<Vec<_>>()
                .join(".")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph() -> TheoryPresentation {
        builtin_theory(BuiltinTheory::Graph)
    }

    #[test]
    fn builtin_graph_is_valid() {
        assert!(validate_theory(&graph()).is_ok());
    }

    #[test]
    fn equation_endpoint_mismatch_is_reported() {
        let mut t = graph();
        t.equations.push(Equation { lhs: Path::identity("E"), rhs: Path::identity("V") });
        let err = validate_theory(&t).unwrap_err();
        assert!(err.to_string().contains("equation endpoint mismatch"), "{err}");
    }

    #[test]
    fn undeclared_object_is_reported() {
        let mut t = graph();
        t.generators.push(GeneratorDecl { name: "w".into(), dom: "V".into(), cod: "W".into() });
        let err = validate_theory(&t).unwrap_err();
        assert_eq!(err.0.len(), 1);
        assert!(err.to_string().contains("undeclared object `W`"), "{err}");
    }

    #[test]
    fn every_violation_is_listed() {
        let mut t = graph();
        t.objects.push("V".into());
        t.generators.push(t.generators[0].clone());
        t.equations.push(Equation {
            lhs: Path { dom: "E".into(), steps: vec!["src".into(), "tgt".into()] },
            rhs: Path::identity("E"),
        });
        let err = validate_theory(&t).unwrap_err();
        assert_eq!(err.0.len(), 3, "{err}");
    }

    #[test]
    fn resolve_and_codomain() {
        let t = Theory::builtin(BuiltinTheory::SGraph);
        let p = t
            .resolve(&Path { dom: "E".into(), steps: vec!["inv".into(), "src".into()] })
            .unwrap();
        assert_eq!(t.object_name(t.path_cod(&p)), "V");
        assert_eq!(t.render_path(&p), "inv.src");
        assert!(t.resolve(&Path { dom: "V".into(), steps: vec!["src".into()] }).is_err());
    }
}
