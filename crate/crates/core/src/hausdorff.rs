//! The Hausdorff metric on C-sets, computed exactly by enumerating admissible
//! transformations.
//!
//! The weight of a transformation `φ` at a generator `f: c -> c'` is the
//! `L^p` distance between `Xf ; φ_{c'}` and `φ_c ; Yf` as maps
//! `X(c) -> Y(c')`; the distance is the least `ℓ^p` aggregate of weights over
//! admissible `φ`. The witness is the lexicographically first minimizer.

use std::fmt;
use std::str::FromStr;

use crate::cset::{check_compatible, enumerate_transformations, find_homomorphism, EnumerationGuard, Instance, Transformation};
use crate::error::{Error, Result};
use crate::ext::{ExtReal, Order};
use crate::mm::{lp_distance, sup_distance};
use crate::scalar::Real;
use crate::theory::{GenId, ObId};

/// Which components a transformation may have.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComponentClass {
    /// Short maps of metric spaces.
    MetShort,
    /// Short and measure-decreasing maps.
    MmShort,
    /// Measure-decreasing maps, with no condition on distances. The cycle
    /// distances `d_H(C_m, C_n) = min(m, n - m)` are attained in this class;
    /// under the directed path metric no injective short map `C_m -> C_n`
    /// exists for `2 <= m < n`.
    MeasureDecreasing,
    /// Any function.
    All,
}

impl FromStr for ComponentClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "met" => Ok(ComponentClass::MetShort),
            "mm" => Ok(ComponentClass::MmShort),
            "md" => Ok(ComponentClass::MeasureDecreasing),
            "all" => Ok(ComponentClass::All),
            _ => Err(format!("unknown component class `{s}` (expected met, mm, md or all)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symmetrize {
    None,
    Max,
    Mean,
}

impl FromStr for Symmetrize {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" => Ok(Symmetrize::None),
            "max" => Ok(Symmetrize::Max),
            "mean" => Ok(Symmetrize::Mean),
            _ => Err(format!("unknown symmetrization `{s}` (expected none, max or mean)")),
        }
    }
}

impl fmt::Display for ComponentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComponentClass::MetShort => "met",
            ComponentClass::MmShort => "mm",
            ComponentClass::MeasureDecreasing => "md",
            ComponentClass::All => "all",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HausdorffConfig<T> {
    pub p: Order<T>,
    pub class: ComponentClass,
    pub symmetrize: Symmetrize,
    pub guard: EnumerationGuard,
}

impl<T: Real> HausdorffConfig<T> {
    pub fn new(p: Order<T>, class: ComponentClass) -> Self {
        HausdorffConfig { p, class, symmetrize: Symmetrize::None, guard: EnumerationGuard::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HausdorffResult<T> {
    pub distance: ExtReal<T>,
    /// A minimizing transformation `x -> y`, absent when none is admissible.
    pub witness: Option<Transformation>,
    /// Weights of the witness, by generator name in declaration order.
    pub per_generator_weights: Vec<(String, ExtReal<T>)>,
    /// One-directional distances `(d(x, y), d(y, x))` when symmetrized.
    pub directed: Option<(ExtReal<T>, ExtReal<T>)>,
}

/// `|φ|_f`: the naturality defect of `t` at generator `f`.
pub fn transformation_weight<T: Real>(
    x: &Instance<T>,
    y: &Instance<T>,
    t: &Transformation,
    f: GenId,
    p: Order<T>,
) -> Result<ExtReal<T>> {
    let th = x.theory();
    let (c, cp) = (th.dom(f), th.cod(f));
    let dy = y.require_metric(cp, "transformation weight")?;
    let (xf, yf) = (x.map(f), y.map(f));
    let (tc, tcp) = (t.component(c), t.component(cp));
    let lhs: Vec<usize> = xf.iter().map(|&i| tcp[i]).collect();
    let rhs: Vec<usize> = tc.iter().map(|&i| yf[i]).collect();
    match (p, x.measure(c)) {
        (Order::Infinity, None) => sup_distance(&lhs, &rhs, dy),
        (_, Some(mu)) => lp_distance(&lhs, &rhs, mu, dy, p),
        (Order::Finite(_), None) => Err(Error::MissingData(format!(
            "finite order p needs a measure on object {}",
            th.object_name(c)
        ))),
    }
}

fn weights<T: Real>(x: &Instance<T>, y: &Instance<T>, t: &Transformation, p: Order<T>) -> Result<Vec<ExtReal<T>>> {
    x.theory().generators().map(|g| transformation_weight(x, y, t, g, p)).collect()
}

/// Checks that the data required by `class` and `p` is present.
fn check_data<T: Real>(x: &Instance<T>, y: &Instance<T>, class: ComponentClass, p: Order<T>) -> Result<()> {
    let th = x.theory();
    for ob in th.objects() {
        if matches!(class, ComponentClass::MetShort | ComponentClass::MmShort) && !x.is_fixed(ob) {
            x.require_metric(ob, "short-map filter")?;
            y.require_metric(ob, "short-map filter")?;
        }
        if matches!(class, ComponentClass::MmShort | ComponentClass::MeasureDecreasing) && !x.is_fixed(ob) {
            x.require_measure(ob, "measure-decreasing filter")?;
            y.require_measure(ob, "measure-decreasing filter")?;
        }
    }
    for g in th.generators() {
        y.require_metric(th.cod(g), "transformation weight")?;
        if p.finite().is_some() {
            x.require_measure(th.dom(g), "finite-order weight")?;
        }
    }
    Ok(())
}

/// Prefix-closed admissibility test for one component.
fn admissible<T: Real>(x: &Instance<T>, y: &Instance<T>, class: ComponentClass, ob: ObId, prefix: &[usize]) -> bool {
    let Some((&v, rest)) = prefix.split_last() else { return true };
    if class == ComponentClass::All || x.is_fixed(ob) {
        return true;
    }
    let tol = T::cmp_tol();
    if class != ComponentClass::MeasureDecreasing {
        let k = rest.len();
        let (dx, dy) = (x.metric(ob).unwrap(), y.metric(ob).unwrap());
        let short = rest.iter().enumerate().all(|(j, &w)| {
            dy.get(v, w).approx_le(&dx.get(k, j), tol) && dy.get(w, v).approx_le(&dx.get(j, k), tol)
        });
        if !short || class == ComponentClass::MetShort {
            return short;
        }
    }
    let (mx, my) = (x.measure(ob).unwrap(), y.measure(ob).unwrap());
    let mass = prefix.iter().enumerate().filter(|(_, &w)| w == v).fold(T::zero(), |a, (i, _)| a + mx.get(i));
    mass <= my.get(v) + tol
}

fn directed<T: Real>(x: &Instance<T>, y: &Instance<T>, cfg: &HausdorffConfig<T>) -> Result<HausdorffResult<T>> {
    check_compatible(x, y)?;
    check_data(x, y, cfg.class, cfg.p)?;
    let filter = |ob: ObId, prefix: &[usize]| admissible(x, y, cfg.class, ob, prefix);
    let tol = T::cmp_tol();
    let mut best: Option<(ExtReal<T>, Transformation, Vec<ExtReal<T>>)> = None;
    for t in enumerate_transformations(x, y, &filter, cfg.guard)? {
        let w = weights(x, y, &t, cfg.p)?;
        let total = cfg.p.aggregate(w.iter().copied());
        let better = match &best {
            None => true,
            Some((b, _, _)) => match (total, *b) {
                (ExtReal::Finite(a), ExtReal::Finite(b)) => a < b - tol,
                (ExtReal::Finite(_), ExtReal::Inf) => true,
                _ => false,
            },
        };
        if better {
            let zero = total.finite().is_some_and(|v| v <= tol);
            best = Some((total, t, w));
            if zero {
                break;
            }
        }
    }
    let th = x.theory();
    Ok(match best {
        Some((distance, t, w)) => HausdorffResult {
            distance,
            witness: Some(t),
            per_generator_weights: th.generators().map(|g| th.generator_name(g).to_string()).zip(w).collect(),
            directed: None,
        },
        None => HausdorffResult { distance: ExtReal::Inf, witness: None, per_generator_weights: Vec::new(), directed: None },
    })
}

/// `d_H(x, y)`, optionally symmetrized.
pub fn hausdorff_distance<T: Real>(
    x: &Instance<T>,
    y: &Instance<T>,
    cfg: &HausdorffConfig<T>,
) -> Result<HausdorffResult<T>> {
    let mut fwd = directed(x, y, cfg)?;
    if cfg.symmetrize == Symmetrize::None {
        return Ok(fwd);
    }
    let back = directed(y, x, cfg)?.distance;
    let there = fwd.distance;
    fwd.distance = match cfg.symmetrize {
        Symmetrize::Max => there.max(back),
        _ => match (there, back) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite((a + b) / T::from_usize(2)),
            _ => ExtReal::Inf,
        },
    };
    fwd.directed = Some((there, back));
    Ok(fwd)
}

/// `sup_x inf_y d_A(attr x, attr y)` for attributed sets, computed both by the
/// formula and as a Hausdorff distance with `p = ∞`; the two must agree.
pub fn classical_hausdorff<T: Real>(xs: &Instance<T>, ys: &Instance<T>) -> Result<ExtReal<T>> {
    check_compatible(xs, ys)?;
    let th = xs.theory();
    let attr = match (th.num_generators(), th.generators().next()) {
        (1, Some(g)) if th.num_objects() == 2 && th.dom(g) != th.cod(g) => g,
        _ => return Err(Error::InvalidInstance("classical Hausdorff needs an attributed-set theory".into())),
    };
    let a = th.cod(attr);
    if !xs.is_fixed(a) {
        return Err(Error::FixedMismatch(format!("attribute object {} must be fixed", th.object_name(a))));
    }
    let d = ys.require_metric(a, "classical Hausdorff")?;
    if xs.metric(a).is_some_and(|dx| dx != d) {
        return Err(Error::FixedMismatch("attribute spaces differ".into()));
    }
    let (ax, ay) = (xs.map(attr), ys.map(attr));
    let direct = ax.iter().fold(ExtReal::zero(), |acc, &u| {
        acc.max(ay.iter().fold(ExtReal::Inf, |m, &v| m.min(d.get(u, v))))
    });
    let mut cfg = HausdorffConfig::new(Order::Infinity, ComponentClass::All);
    cfg.guard = EnumerationGuard::forced();
    let mut x = xs.clone();
    if x.measure(th.dom(attr)).is_some() {
        // The formula ignores measures; so must the comparison.
        x = strip_measures(x);
    }
    let via = directed(&x, ys, &cfg)?.distance;
    if !via.approx_eq(&direct, T::cmp_tol()) {
        return Err(Error::Inconsistent(format!("sup-inf formula gives {direct}, enumeration gives {via}")));
    }
    Ok(direct)
}

fn strip_measures<T: Real>(x: Instance<T>) -> Instance<T> {
    let th = x.theory_arc().clone();
    let mut out = Instance::new(th.clone(), x.cards().to_vec(), th.generators().map(|g| x.map(g).to_vec()).collect())
        .expect("already valid");
    for ob in th.objects() {
        if let Some(d) = x.metric(ob) {
            out = out.with_metric(ob, d.clone()).expect("same shape");
        }
        if x.is_fixed(ob) {
            out = out.with_fixed(ob);
        }
    }
    out
}

/// With discrete metrics everywhere, `d_H(x, y) = 0` exactly when a
/// homomorphism exists. Runs both computations and reports their common answer.
pub fn discrete_hausdorff_is_hom<T: Real>(x: &Instance<T>, y: &Instance<T>) -> Result<bool> {
    let th = x.theory();
    for ob in th.objects() {
        for inst in [x, y] {
            if !inst.require_metric(ob, "discrete Hausdorff")?.is_discrete() {
                return Err(Error::InvalidMetric(format!("metric on {} is not discrete", th.object_name(ob))));
            }
        }
    }
    let cfg = HausdorffConfig::new(Order::Infinity, ComponentClass::MetShort);
    let zero = directed(x, y, &cfg)?.distance == ExtReal::zero();
    let hom = find_homomorphism(x, y)?.is_some();
    if zero != hom {
        return Err(Error::Inconsistent(format!("d_H = 0 is {zero} but homomorphism search says {hom}")));
    }
    Ok(hom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mm::{discrete_metric, shortest_path_metric, MeasureData, MetricData};
    use crate::theory::{BuiltinTheory, Theory};
    use std::sync::Arc;

    fn weak_graph(nv: usize, edges: &[(usize, usize)]) -> Instance<f64> {
        let t = Arc::new(Theory::builtin(BuiltinTheory::Graph));
        let x = Instance::from_named(
            t,
            &[("V", nv), ("E", edges.len())],
            &[("src", edges.iter().map(|e| e.0).collect()), ("tgt", edges.iter().map(|e| e.1).collect())],
        )
        .unwrap();
        let (e, v) = (x.ob("E").unwrap(), x.ob("V").unwrap());
        let dv = shortest_path_metric(&x, None).unwrap();
        x.with_metric(v, dv)
            .unwrap()
            .with_metric(e, discrete_metric(edges.len()))
            .unwrap()
            .with_measure(v, MeasureData::counting(nv))
            .unwrap()
            .with_measure(e, MeasureData::counting(edges.len()))
            .unwrap()
    }

    fn cycle(n: usize) -> Instance<f64> {
        weak_graph(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    fn md1() -> HausdorffConfig<f64> {
        HausdorffConfig::new(Order::one(), ComponentClass::MeasureDecreasing)
    }

    #[test]
    fn fig9_weights() {
        let (x, y) = (cycle(2), cycle(4));
        let t = Transformation { components: vec![vec![0, 1], vec![0, 1]] };
        let src = x.theory().generator("src").unwrap();
        let tgt = x.theory().generator("tgt").unwrap();
        assert_eq!(transformation_weight(&x, &y, &t, src, Order::one()).unwrap(), ExtReal::Finite(0.0));
        assert_eq!(transformation_weight(&x, &y, &t, tgt, Order::one()).unwrap(), ExtReal::Finite(2.0));
    }

    #[test]
    fn cycles() {
        let r = hausdorff_distance(&cycle(2), &cycle(4), &md1()).unwrap();
        assert_eq!(r.distance, ExtReal::Finite(2.0));
        let w = r.witness.unwrap();
        assert!(crate::cset::is_natural(&cycle(2), &cycle(4), &w).is_ok());
        assert_eq!(hausdorff_distance(&cycle(4), &cycle(2), &md1()).unwrap().distance, ExtReal::Inf);
        assert_eq!(hausdorff_distance(&cycle(3), &cycle(3), &md1()).unwrap().distance, ExtReal::zero());
    }

    #[test]
    fn cycles_admit_no_short_injection() {
        let mm = HausdorffConfig::new(Order::one(), ComponentClass::MmShort);
        assert_eq!(hausdorff_distance(&cycle(2), &cycle(4), &mm).unwrap().distance, ExtReal::Inf);
        assert_eq!(hausdorff_distance(&cycle(1), &cycle(4), &mm).unwrap().distance, ExtReal::Finite(1.0));
        assert_eq!(hausdorff_distance(&cycle(4), &cycle(4), &mm).unwrap().distance, ExtReal::zero());
    }

    #[test]
    fn symmetrized() {
        let mut cfg = md1();
        cfg.symmetrize = Symmetrize::Max;
        let r = hausdorff_distance(&cycle(2), &cycle(4), &cfg).unwrap();
        assert_eq!(r.distance, ExtReal::Inf);
        assert_eq!(r.directed, Some((ExtReal::Finite(2.0), ExtReal::Inf)));
    }

    #[test]
    fn finite_order_needs_measures() {
        let t = Arc::new(Theory::builtin(BuiltinTheory::Graph));
        let x = Instance::<f64>::from_named(t, &[("V", 1), ("E", 1)], &[("src", vec![0]), ("tgt", vec![0])]).unwrap();
        let x = x.with_metric(ObId(1), discrete_metric(1)).unwrap();
        let cfg = HausdorffConfig::new(Order::one(), ComponentClass::All);
        assert!(matches!(hausdorff_distance(&x, &x, &cfg), Err(Error::MissingData(_))));
        let cfg = HausdorffConfig::new(Order::Infinity, ComponentClass::All);
        assert_eq!(hausdorff_distance(&x, &x, &cfg).unwrap().distance, ExtReal::zero());
    }

    fn aset(values: &[usize], line: usize) -> Instance<f64> {
        let t = Arc::new(Theory::builtin(BuiltinTheory::ASet));
        let x = Instance::from_named(t, &[("X", values.len()), ("A", line)], &[("attr", values.to_vec())]).unwrap();
        let d = MetricData::from_rows(
            (0..line).map(|i| (0..line).map(|j| ExtReal::Finite((i as f64 - j as f64).abs())).collect()).collect(),
        )
        .unwrap();
        let a = x.ob("A").unwrap();
        let p = x.ob("X").unwrap();
        x.with_metric(a, d).unwrap().with_metric(p, discrete_metric(values.len())).unwrap().with_fixed(a)
    }

    #[test]
    fn classical_examples() {
        assert_eq!(classical_hausdorff(&aset(&[1, 2], 11), &aset(&[0, 1, 2], 11)).unwrap(), ExtReal::zero());
        assert_eq!(classical_hausdorff(&aset(&[0], 11), &aset(&[3], 11)).unwrap(), ExtReal::Finite(3.0));
        assert_eq!(classical_hausdorff(&aset(&[0, 10], 11), &aset(&[1, 8], 11)).unwrap(), ExtReal::Finite(2.0));
        let mut cfg = HausdorffConfig::new(Order::Infinity, ComponentClass::MetShort);
        cfg.symmetrize = Symmetrize::Max;
        let r = hausdorff_distance(&aset(&[0, 10], 11), &aset(&[1, 8], 11), &cfg).unwrap();
        assert_eq!(r.distance, ExtReal::Finite(2.0));
    }

    #[test]
    fn discrete_reduces_to_homomorphism() {
        let disc = |nv: usize, edges: &[(usize, usize)]| {
            let x = weak_graph(nv, edges);
            let v = x.ob("V").unwrap();
            x.with_metric(v, discrete_metric(nv)).unwrap()
        };
        let path = disc(3, &[(0, 1), (1, 2)]);
        let diamond = disc(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert!(discrete_hausdorff_is_hom(&path, &diamond).unwrap());
        let lp = disc(1, &[(0, 0)]);
        let tri = disc(3, &[(0, 1), (1, 2), (2, 0)]);
        assert!(!discrete_hausdorff_is_hom(&lp, &tri).unwrap());
        assert!(discrete_hausdorff_is_hom(&tri, &tri).unwrap());
        assert!(discrete_hausdorff_is_hom(&cycle(3), &cycle(3)).is_err());
    }
}
