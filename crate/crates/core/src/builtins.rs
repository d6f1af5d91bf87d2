//! Example instances shipped with the library, and constructors for the
//! families they come from.
//!
//! Graph fixtures carry counting measures and a discrete metric on edges.
//! Cycles `c1`..`c6` use the shortest-path metric on vertices; the other graph
//! fixtures use the discrete metric there too. `line_x`/`line_y` are attributed
//! sets over the points `0..=10` of the line, with the attribute space fixed.

use std::sync::Arc;

use crate::cset::Instance;
use crate::error::{Error, Result};
use crate::json::instance_from_str;
use crate::mm::{discrete_metric, shortest_path_metric, MeasureData, MetricData};
use crate::scalar::Real;
use crate::ext::ExtReal;
use crate::theory::{BuiltinTheory, Theory};

const SOURCES: &[(&str, &str)] = &[
    ("fig5x", include_str!("../examples/fig5x.json")),
    ("fig5y", include_str!("../examples/fig5y.json")),
    ("loop", include_str!("../examples/loop.json")),
    ("c3undirected", include_str!("../examples/c3undirected.json")),
    ("c1", include_str!("../examples/c1.json")),
    ("c2", include_str!("../examples/c2.json")),
    ("c3", include_str!("../examples/c3.json")),
    ("c4", include_str!("../examples/c4.json")),
    ("c5", include_str!("../examples/c5.json")),
    ("c6", include_str!("../examples/c6.json")),
    ("line_x", include_str!("../examples/line_x.json")),
    ("line_y", include_str!("../examples/line_y.json")),
];

/// Figure names that reuse another fixture.
const ALIASES: &[(&str, &str)] = &[
    ("fig6x", "loop"),
    ("fig6y", "c3undirected"),
    ("fig7x", "loop"),
    ("fig7y", "c3"),
    ("fig8y", "loop"),
    ("fig9x", "c2"),
    ("fig9y", "c4"),
];

/// Every builtin name, fixtures first, then aliases.
pub fn names() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|s| s.0).chain(ALIASES.iter().map(|a| a.0))
}

/// The JSON text of a builtin fixture.
pub fn source(name: &str) -> Option<&'static str> {
    let name = ALIASES.iter().find(|a| a.0 == name).map_or(name, |a| a.1);
    SOURCES.iter().find(|s| s.0 == name).map(|s| s.1)
}

pub fn load<T: Real>(name: &str) -> Result<Instance<T>> {
    let text = source(name).ok_or_else(|| Error::InvalidInstance(format!("no builtin instance `{name}`")))?;
    instance_from_str(text)
}

/// A plain graph with no metric or measure data.
pub fn graph<T: Real>(nv: usize, edges: &[(usize, usize)]) -> Result<Instance<T>> {
    let t = Arc::new(Theory::builtin(BuiltinTheory::Graph));
    Instance::from_named(
        t,
        &[("V", nv), ("E", edges.len())],
        &[("src", edges.iter().map(|e| e.0).collect()), ("tgt", edges.iter().map(|e| e.1).collect())],
    )
}

/// Discrete metrics and counting measures on vertices and edges.
pub fn discrete_graph<T: Real>(nv: usize, edges: &[(usize, usize)]) -> Result<Instance<T>> {
    let x = graph(nv, edges)?;
    let (e, v) = (x.ob("E")?, x.ob("V")?);
    x.with_metric(v, discrete_metric(nv))?
        .with_metric(e, discrete_metric(edges.len()))?
        .with_measure(v, MeasureData::counting(nv))?
        .with_measure(e, MeasureData::counting(edges.len()))
}

/// Shortest-path metric on vertices, discrete metric on edges, counting
/// measures on both.
pub fn weak_graph<T: Real>(nv: usize, edges: &[(usize, usize)]) -> Result<Instance<T>> {
    let x = discrete_graph(nv, edges)?;
    let d = shortest_path_metric(&x, None)?;
    let v = x.ob("V")?;
    x.with_metric(v, d)
}

/// The directed cycle `C_n` as a weak graph.
pub fn cycle<T: Real>(n: usize) -> Result<Instance<T>> {
    weak_graph(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
}

/// `|a - b|` on the given points.
pub fn line_metric<T: Real>(points: &[T]) -> MetricData<T> {
    let n = points.len();
    let d = (0..n * n).map(|k| ExtReal::Finite((points[k / n] - points[k % n]).abs())).collect();
    MetricData::new(n, d).expect("square by construction")
}

/// An attributed set over a fixed attribute space: discrete metric on `X`,
/// measure `mu` on `X`.
pub fn attributed_set<T: Real>(attr: &[usize], space: MetricData<T>, mu: MeasureData<T>) -> Result<Instance<T>> {
    let t = Arc::new(Theory::builtin(BuiltinTheory::ASet));
    let x = Instance::from_named(t, &[("X", attr.len()), ("A", space.len())], &[("attr", attr.to_vec())])?;
    let (ob_x, ob_a) = (x.ob("X")?, x.ob("A")?);
    let n = attr.len();
    Ok(x.with_metric(ob_x, discrete_metric(n))?.with_measure(ob_x, mu)?.with_metric(ob_a, space)?.with_fixed(ob_a))
}

/// A vertex-attributed graph over a fixed attribute space: discrete metrics
/// on vertices and edges, the given measures on them.
pub fn vertex_attributed_graph<T: Real>(
    nv: usize,
    edges: &[(usize, usize)],
    attr: &[usize],
    space: MetricData<T>,
    mu_v: MeasureData<T>,
    mu_e: MeasureData<T>,
) -> Result<Instance<T>> {
    let t = Arc::new(Theory::builtin(BuiltinTheory::VGraph));
    let x = Instance::from_named(
        t,
        &[("V", nv), ("E", edges.len()), ("A", space.len())],
        &[
            ("src", edges.iter().map(|e| e.0).collect()),
            ("tgt", edges.iter().map(|e| e.1).collect()),
            ("attr", attr.to_vec()),
        ],
    )?;
    let (e, v, a) = (x.ob("E")?, x.ob("V")?, x.ob("A")?);
    Ok(x.with_metric(v, discrete_metric(nv))?
        .with_metric(e, discrete_metric(edges.len()))?
        .with_measure(v, mu_v)?
        .with_measure(e, mu_e)?
        .with_metric(a, space)?
        .with_fixed(a))
}
