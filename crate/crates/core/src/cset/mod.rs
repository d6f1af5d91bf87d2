//! Finite C-set instances: one finite set `0..n_c` per object, one function per
//! generator, plus optional per-object metric and measure data.

mod enumerate;
mod search;

use std::sync::Arc;

pub use enumerate::{
    all_components, count_functions, enumerate_transformations, injective_components, EnumerationGuard,
    Transformations, DEFAULT_GUARD,
};
pub use search::{find_homomorphism, find_homomorphism_with_limit};

use crate::error::{check_dim, Error, Result};
use crate::mm::{MeasureData, MetricData};
use crate::scalar::Real;
use crate::theory::{GenId, IndexedPath, ObId, Path, Theory};

#[derive(Clone, Debug, PartialEq)]
pub struct Instance<T> {
    theory: Arc<Theory>,
    sets: Vec<usize>,
    maps: Vec<Vec<usize>>,
    metrics: Vec<Option<MetricData<T>>>,
    measures: Vec<Option<MeasureData<T>>>,
    fixed: Vec<bool>,
}

impl<T: Real> Instance<T> {
    /// Builds and validates an instance. `sets` and `maps` follow the
    /// declaration order of objects and generators.
    pub fn new(theory: Arc<Theory>, sets: Vec<usize>, maps: Vec<Vec<usize>>) -> Result<Self> {
        let n = theory.num_objects();
        let x = Instance {
            theory,
            sets,
            maps,
            metrics: vec![None; n],
            measures: vec![None; n],
            fixed: vec![false; n],
        };
        validate_instance(&x)?;
        Ok(x)
    }

    /// Like [`Instance::new`] with objects and generators given by name.
    /// Unlisted objects are empty.
    pub fn from_named(theory: Arc<Theory>, sets: &[(&str, usize)], maps: &[(&str, Vec<usize>)]) -> Result<Self> {
        let mut card = vec![0; theory.num_objects()];
        for (name, n) in sets {
            card[lookup_object(&theory, name)?.0] = *n;
        }
        let mut fs: Vec<Option<Vec<usize>>> = vec![None; theory.num_generators()];
        for (name, f) in maps {
            let g = theory
                .generator(name)
                .ok_or_else(|| Error::InvalidInstance(format!("unknown generator `{name}`")))?;
            fs[g.0] = Some(f.clone());
        }
        let mut out = Vec::with_capacity(fs.len());
        for (g, f) in fs.into_iter().enumerate() {
            match f {
                Some(f) => out.push(f),
                None if card[theory.dom(GenId(g)).0] == 0 => out.push(Vec::new()),
                None => {
                    return Err(Error::InvalidInstance(format!(
                        "missing map for generator `{}`",
                        theory.generator_name(GenId(g))
                    )))
                }
            }
        }
        Instance::new(theory, card, out)
    }

    pub fn with_metric(mut self, ob: ObId, d: MetricData<T>) -> Result<Self> {
        check_dim(&format!("metric on {}", self.theory.object_name(ob)), self.sets[ob.0], d.len())?;
        self.metrics[ob.0] = Some(d);
        Ok(self)
    }

    pub fn with_measure(mut self, ob: ObId, mu: MeasureData<T>) -> Result<Self> {
        check_dim(&format!("measure on {}", self.theory.object_name(ob)), self.sets[ob.0], mu.len())?;
        self.measures[ob.0] = Some(mu);
        Ok(self)
    }

    pub fn with_fixed(mut self, ob: ObId) -> Self {
        self.fixed[ob.0] = true;
        self
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    pub fn theory_arc(&self) -> &Arc<Theory> {
        &self.theory
    }

    /// Object id by name, as a crate error.
    pub fn ob(&self, name: &str) -> Result<ObId> {
        lookup_object(&self.theory, name)
    }

    pub fn card(&self, ob: ObId) -> usize {
        self.sets[ob.0]
    }

    pub fn cards(&self) -> &[usize] {
        &self.sets
    }

    pub fn map(&self, g: GenId) -> &[usize] {
        &self.maps[g.0]
    }

    pub fn metric(&self, ob: ObId) -> Option<&MetricData<T>> {
        self.metrics[ob.0].as_ref()
    }

    pub fn measure(&self, ob: ObId) -> Option<&MeasureData<T>> {
        self.measures[ob.0].as_ref()
    }

    pub fn is_fixed(&self, ob: ObId) -> bool {
        self.fixed[ob.0]
    }

    /// Metric on `ob`, or a `MissingData` error naming what needed it.
    pub fn require_metric(&self, ob: ObId, purpose: &str) -> Result<&MetricData<T>> {
        self.metric(ob).ok_or_else(|| {
            Error::MissingData(format!("{purpose} needs a metric on object {}", self.theory.object_name(ob)))
        })
    }

    pub fn require_measure(&self, ob: ObId, purpose: &str) -> Result<&MeasureData<T>> {
        self.measure(ob).ok_or_else(|| {
            Error::MissingData(format!("{purpose} needs a measure on object {}", self.theory.object_name(ob)))
        })
    }

    /// Human-readable element name such as `e0` or `v3`.
    pub fn element_name(&self, ob: ObId, i: usize) -> String {
        format!("{}{i}", self.theory.object_name(ob).to_lowercase())
    }
}

fn lookup_object(theory: &Theory, name: &str) -> Result<ObId> {
    theory
        .object(name)
        .ok_or_else(|| Error::InvalidInstance(format!("unknown object `{name}` in theory {}", theory.name())))
}

/// Checks map shapes and ranges, metric/measure dimensions, and every theory
/// equation elementwise.
pub fn validate_instance<T: Real>(x: &Instance<T>) -> Result<()> {
    let th = x.theory();
    check_dim("object cardinalities", th.num_objects(), x.sets.len())?;
    if x.maps.len() != th.num_generators() {
        let missing = th.generators().nth(x.maps.len()).map(|g| th.generator_name(g).to_string());
        return Err(Error::InvalidInstance(match missing {
            Some(name) => format!("missing map for generator `{name}`"),
            None => format!("{} maps given for {} generators", x.maps.len(), th.num_generators()),
        }));
    }
    for g in th.generators() {
        let (dom, cod) = (th.dom(g), th.cod(g));
        let f = x.map(g);
        let name = th.generator_name(g);
        if f.len() != x.card(dom) {
            return Err(Error::InvalidInstance(format!(
                "map `{name}` has length {}, expected |{}| = {}",
                f.len(),
                th.object_name(dom),
                x.card(dom)
            )));
        }
        if let Some((i, &v)) = f.iter().enumerate().find(|(_, &v)| v >= x.card(cod)) {
            return Err(Error::InvalidInstance(format!(
                "map `{name}` sends {} to {v}, outside {} = 0..{}",
                x.element_name(dom, i),
                th.object_name(cod),
                x.card(cod)
            )));
        }
    }
    for ob in th.objects() {
        if let Some(d) = x.metric(ob) {
            check_dim("metric", x.card(ob), d.len())?;
        }
        if let Some(mu) = x.measure(ob) {
            check_dim("measure", x.card(ob), mu.len())?;
        }
    }
    for (lhs, rhs) in th.equations() {
        let (a, b) = (evaluate_indexed(x, lhs), evaluate_indexed(x, rhs));
        if let Some(i) = (0..a.len()).find(|&i| a[i] != b[i]) {
            return Err(Error::InvalidInstance(format!(
                "equation {} = {} violated at {}",
                th.render_path(lhs),
                th.render_path(rhs),
                x.element_name(lhs.dom, i)
            )));
        }
    }
    Ok(())
}

fn evaluate_indexed<T>(x: &Instance<T>, p: &IndexedPath) -> Vec<usize> {
    let mut out: Vec<usize> = (0..x.sets[p.dom.0]).collect();
    for g in &p.steps {
        let f = &x.maps[g.0];
        for v in &mut out {
            *v = f[*v];
        }
    }
    out
}

/// The composite function of a path; the identity for an empty path.
pub fn evaluate_path<T: Real>(x: &Instance<T>, p: &Path) -> Result<Vec<usize>> {
    let ip = x.theory().resolve(p).map_err(crate::theory::TheoryErrors::from)?;
    Ok(evaluate_indexed(x, &ip))
}

/// Same as [`evaluate_path`] for a path already resolved against the theory.
pub fn evaluate_indexed_path<T: Real>(x: &Instance<T>, p: &IndexedPath) -> Result<Vec<usize>> {
    let th = x.theory();
    let mut at = p.dom;
    for g in &p.steps {
        if g.0 >= th.num_generators() || th.dom(*g) != at {
            return Err(Error::InvalidInstance(format!("malformed path at generator index {}", g.0)));
        }
        at = th.cod(*g);
    }
    Ok(evaluate_indexed(x, p))
}

/// Per-object functions `X(c) -> Y(c)`, not necessarily natural.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transformation {
    pub components: Vec<Vec<usize>>,
}

impl Transformation {
    pub fn identity<T>(x: &Instance<T>) -> Self {
        Transformation { components: x.sets.iter().map(|&n| (0..n).collect()).collect() }
    }

    pub fn component(&self, ob: ObId) -> &[usize] {
        &self.components[ob.0]
    }

    /// Checks that each component is a total function `X(c) -> Y(c)`.
    pub fn check_shape<T>(&self, x: &Instance<T>, y: &Instance<T>) -> Result<()> {
        check_dim("transformation components", x.sets.len(), self.components.len())?;
        for (c, comp) in self.components.iter().enumerate() {
            check_dim(&format!("component at {}", x.theory.object_name(ObId(c))), x.sets[c], comp.len())?;
            if let Some(&v) = comp.iter().find(|&&v| v >= y.sets[c]) {
                return Err(Error::Dimension {
                    context: format!("component codomain at {}", x.theory.object_name(ObId(c))),
                    expected: y.sets[c],
                    found: v + 1,
                });
            }
        }
        Ok(())
    }
}

/// Whether `Xf ; t_{c'} = t_c ; Yf` for every generator `f: c -> c'`.
pub fn is_natural<T: Real>(x: &Instance<T>, y: &Instance<T>, t: &Transformation) -> Result<bool> {
    check_compatible(x, y)?;
    t.check_shape(x, y)?;
    let th = x.theory();
    Ok(th.generators().all(|g| {
        let (c, cp) = (th.dom(g), th.cod(g));
        let (xf, yf) = (x.map(g), y.map(g));
        (0..x.card(c)).all(|i| t.components[cp.0][xf[i]] == yf[t.components[c.0][i]])
    }))
}

/// Same theory, same fixed objects, and identical carriers and metrics on
/// fixed objects.
pub fn check_compatible<T: Real>(x: &Instance<T>, y: &Instance<T>) -> Result<()> {
    if !Arc::ptr_eq(&x.theory, &y.theory) && *x.theory != *y.theory {
        return Err(Error::TheoryMismatch { left: x.theory.name().into(), right: y.theory.name().into() });
    }
    for ob in x.theory.objects() {
        let name = x.theory.object_name(ob);
        if x.is_fixed(ob) != y.is_fixed(ob) {
            return Err(Error::FixedMismatch(format!("object {name} is fixed in only one instance")));
        }
        if !x.is_fixed(ob) {
            continue;
        }
        if x.card(ob) != y.card(ob) {
            return Err(Error::FixedMismatch(format!(
                "fixed object {name} has {} elements on one side and {} on the other",
                x.card(ob),
                y.card(ob)
            )));
        }
        if let (Some(a), Some(b)) = (x.metric(ob), y.metric(ob)) {
            if a != b {
                return Err(Error::FixedMismatch(format!("fixed object {name} carries different metrics")));
            }
        }
    }
    Ok(())
}
