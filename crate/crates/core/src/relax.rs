//! Linear programs over Markov transformations: feasibility of Markov
//! morphisms and the Wasserstein metric on metric measure C-spaces.
//!
//! Kernel variables `Φ_c[x, y]` are laid out row-major per object. Coupling
//! variables use the product indexing of [`crate::markov`]: the pair `(y, y')`
//! is `y * |Y| + y'`.

use std::fmt;
use std::str::FromStr;

use crate::cset::{check_compatible, Instance};
use crate::error::{Error, Result};
use crate::ext::{ExtReal, Order};
use crate::hausdorff::{hausdorff_distance, ComponentClass, HausdorffConfig};
use crate::lp::{solve, LpModel, LpStatus, Relation, VarId};
use crate::markov::{compose_kernels, embed_function, FiniteKernel, MarkovTransformation};
use crate::scalar::Real;
use crate::theory::ObId;

/// Tolerance for repairing and checking kernels read back from the solver.
const EXTRACT_TOL: f64 = 1e-7;
/// Tolerance for naturality of extracted certificates.
const NATURALITY_TOL: f64 = 1e-6;

/// Kernel variables `Φ_c`, one block per object; `None` on fixed objects.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelLayout {
    pub phi: Vec<Option<Vec<VarId>>>,
    pub shape: Vec<(usize, usize)>,
}

impl KernelLayout {
    fn new<T: Real>(model: &mut LpModel<T>, x: &Instance<T>, y: &Instance<T>) -> Self {
        let th = x.theory();
        let mut phi = Vec::new();
        let mut shape = Vec::new();
        for c in th.objects() {
            let (n, m) = (x.card(c), y.card(c));
            shape.push((n, m));
            if x.is_fixed(c) {
                phi.push(None);
                continue;
            }
            let name = th.object_name(c);
            phi.push(Some((0..n * m).map(|k| model.add_var(format!("phi_{name}[{},{}]", k / m, k % m), None)).collect()));
        }
        KernelLayout { phi, shape }
    }

    fn var(&self, c: ObId, i: usize, j: usize) -> Option<VarId> {
        self.phi[c.0].as_ref().map(|v| v[i * self.shape[c.0].1 + j])
    }

    /// Reads the kernels back, repairing round-off and using the identity on
    /// fixed objects.
    fn extract<T: Real>(&self, values: &[T]) -> Result<MarkovTransformation<T>> {
        let components = self
            .phi
            .iter()
            .zip(&self.shape)
            .map(|(vars, &(n, m))| match vars {
                None => Ok(FiniteKernel::identity(n)),
                Some(vars) => FiniteKernel::from_approximate(
                    n,
                    m,
                    vars.iter().map(|v| values[v.0]).collect(),
                    T::from_f64(EXTRACT_TOL),
                ),
            })
            .collect::<Result<_>>()?;
        Ok(MarkovTransformation { components })
    }
}

fn add_row_sums<T: Real>(model: &mut LpModel<T>, x: &Instance<T>, layout: &KernelLayout) {
    let th = x.theory();
    for c in th.objects() {
        let Some(vars) = &layout.phi[c.0] else { continue };
        let (n, m) = layout.shape[c.0];
        for i in 0..n {
            let row = (0..m).map(|j| (vars[i * m + j], T::one())).collect();
            model.add_constraint(format!("rowsum_{}[{i}]", th.object_name(c)), row, Relation::Eq, T::one());
        }
    }
}

/// The feasibility program together with the position of its kernel
/// variables.
#[derive(Clone, Debug)]
pub struct FeasibilityProgram<T> {
    pub model: LpModel<T>,
    pub layout: KernelLayout,
}

/// Variables `Φ_c >= 0` with unit row sums and, for each generator
/// `f: c -> c'`, the naturality equations `Xf · Φ_{c'} = Φ_c · Yf`. Kernels on
/// fixed objects are pinned to the identity. The objective is zero.
pub fn markov_feasibility_lp<T: Real>(
    x: &Instance<T>,
    y: &Instance<T>,
    measure_preserving: bool,
) -> Result<FeasibilityProgram<T>> {
    check_compatible(x, y)?;
    let th = x.theory();
    let mut model = LpModel::new();
    // Fixed objects get variables too here, pinned by equations.
    let mut phi = Vec::new();
    let mut shape = Vec::new();
    for c in th.objects() {
        let (n, m) = (x.card(c), y.card(c));
        let name = th.object_name(c);
        phi.push(Some((0..n * m).map(|k| model.add_var(format!("phi_{name}[{},{}]", k / m, k % m), None)).collect()));
        shape.push((n, m));
    }
    let layout = KernelLayout { phi, shape };
    add_row_sums(&mut model, x, &layout);

    for c in th.objects().filter(|&c| x.is_fixed(c)) {
        for i in 0..x.card(c) {
            let v = layout.var(c, i, i).unwrap();
            model.add_constraint(format!("fix_{}[{i}]", th.object_name(c)), vec![(v, T::one())], Relation::Eq, T::one());
        }
    }

    for g in th.generators() {
        let (c, cp) = (th.dom(g), th.cod(g));
        let (xf, yf) = (x.map(g), y.map(g));
        let name = th.generator_name(g);
        for i in 0..x.card(c) {
            for yp in 0..y.card(cp) {
                let mut row = vec![(layout.var(cp, xf[i], yp).unwrap(), T::one())];
                for (z, _) in yf.iter().enumerate().filter(|(_, &w)| w == yp) {
                    row.push((layout.var(c, i, z).unwrap(), -T::one()));
                }
                model.add_constraint(format!("nat_{name}[{i},{yp}]"), row, Relation::Eq, T::zero());
            }
        }
    }

    if measure_preserving {
        for c in th.objects() {
            let (mx, my) = (x.require_measure(c, "measure-preserving")?, y.require_measure(c, "measure-preserving")?);
            for j in 0..y.card(c) {
                let row = (0..x.card(c)).map(|i| (layout.var(c, i, j).unwrap(), mx.get(i))).collect();
                model.add_constraint(format!("mpres_{}[{j}]", th.object_name(c)), row, Relation::Eq, my.get(j));
            }
        }
    }
    Ok(FeasibilityProgram { model, layout })
}

/// Checks `Xf · Φ_{c'} = Φ_c · Yf` for every generator within `tol`.
pub fn is_markov_natural<T: Real>(
    x: &Instance<T>,
    y: &Instance<T>,
    phi: &MarkovTransformation<T>,
    tol: T,
) -> Result<bool> {
    let th = x.theory();
    for g in th.generators() {
        let (c, cp) = (th.dom(g), th.cod(g));
        let xf = embed_function(x.map(g), x.card(cp))?;
        let yf = embed_function(y.map(g), y.card(cp))?;
        let lhs = compose_kernels(&xf, &phi.components[cp.0])?;
        let rhs = compose_kernels(&phi.components[c.0], &yf)?;
        if !lhs.approx_eq(&rhs, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Solves the feasibility program; on success returns a verified Markov
/// morphism `x -> y`.
pub fn markov_feasible<T: Real>(
    x: &Instance<T>,
    y: &Instance<T>,
    measure_preserving: bool,
) -> Result<Option<MarkovTransformation<T>>> {
    let prog = markov_feasibility_lp(x, y, measure_preserving)?;
    let sol = solve(&prog.model)?;
    match sol.status {
        LpStatus::Infeasible => return Ok(None),
        LpStatus::Unbounded => return Err(Error::Inconsistent("feasibility program reported unbounded".into())),
        LpStatus::Optimal => {}
    }
    let phi = prog.layout.extract(&sol.values)?;
    if !is_markov_natural(x, y, &phi, T::from_f64(NATURALITY_TOL))? {
        return Err(Error::Inconsistent("extracted Markov morphism fails a naturality check".into()));
    }
    Ok(Some(phi))
}

/// Which constraints on the kernel components the Wasserstein program keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WassersteinClass {
    /// Distance- and measure-decreasing kernels.
    MmShort,
    /// Arbitrary kernels.
    NoShort,
}

impl FromStr for WassersteinClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mm" => Ok(WassersteinClass::MmShort),
            "noshort" => Ok(WassersteinClass::NoShort),
            _ => Err(format!("unknown class `{s}` (expected mm or noshort)")),
        }
    }
}

impl fmt::Display for WassersteinClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WassersteinClass::MmShort => "mm",
            WassersteinClass::NoShort => "noshort",
        })
    }
}

/// Coupling block `Π_c` for one pair `(x, x')` of `X(c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairCoupling {
    pub object: ObId,
    pub pair: (usize, usize),
    pub vars: Vec<VarId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WassersteinLayout {
    pub kernels: KernelLayout,
    pub object_couplings: Vec<PairCoupling>,
    /// `Π_f` per generator, indexed `x * |Y(c')|^2 + y * |Y(c')| + y'`.
    pub generator_couplings: Vec<Option<Vec<VarId>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WassersteinProgram<T> {
    pub model: LpModel<T>,
    pub layout: WassersteinLayout,
    /// `δ = d^p` on `X(c)` and `Y(c)`, row-major, when the metric is present.
    pub cost_vectors: Vec<(Option<Vec<ExtReal<T>>>, Option<Vec<ExtReal<T>>>)>,
    /// Which couplings were left out of the program, and why.
    pub eliminated: Vec<String>,
    /// Variables fixed at zero because they multiply an infinite cost.
    pub pinned: Vec<VarId>,
    /// Objective contribution of generators between fixed objects.
    pub constant: ExtReal<T>,
    /// Set when the program is known to be infeasible without solving.
    pub infeasible: Option<String>,
}

impl<T: Real> WassersteinProgram<T> {
    /// Total objective `d_{W,p}^p` at a solution of the model.
    pub fn value_at(&self, values: &[T]) -> ExtReal<T> {
        ExtReal::Finite(self.model.objective_value(values).max(T::zero())) + self.constant
    }
}

fn check_wasserstein_data<T: Real>(x: &Instance<T>, y: &Instance<T>, class: WassersteinClass) -> Result<()> {
    let th = x.theory();
    for c in th.objects() {
        if x.is_fixed(c) {
            continue;
        }
        for inst in [x, y] {
            inst.require_measure(c, "Wasserstein program")?;
            if class == WassersteinClass::MmShort {
                inst.require_metric(c, "Wasserstein program")?;
            }
        }
    }
    for g in th.generators() {
        y.require_metric(th.cod(g), "Wasserstein program")?;
        x.require_measure(th.dom(g), "Wasserstein program")?;
    }
    Ok(())
}

/// Builds the linear program whose value is `d_{W,p}(x, y)^p`.
pub fn wasserstein_cset_lp<T: Real>(
    x: &Instance<T>,
    y: &Instance<T>,
    p: Order<T>,
    class: WassersteinClass,
) -> Result<WassersteinProgram<T>> {
    check_compatible(x, y)?;
    let p = p.finite().ok_or_else(|| {
        Error::UnsupportedOrder("the Wasserstein program needs a finite order p; for p = inf it is not linear".into())
    })?;
    check_wasserstein_data(x, y, class)?;
    let th = x.theory();
    let tol = T::cmp_tol();

    let mut model = LpModel::new();
    let kernels = KernelLayout::new(&mut model, x, y);
    add_row_sums(&mut model, x, &kernels);
    let mut eliminated = Vec::new();
    let mut pinned = Vec::new();
    let mut infeasible = None;
    let cost_vectors: Vec<_> = th
        .objects()
        .map(|c| (x.metric(c).map(|d| d.powf(p)), y.metric(c).map(|d| d.powf(p))))
        .collect();

    let mut object_couplings = Vec::new();
    for c in th.objects() {
        let name = th.object_name(c);
        if x.is_fixed(c) {
            continue;
        }
        if class == WassersteinClass::NoShort {
            eliminated.push(format!("Pi_{name}: shortness constraints dropped"));
            continue;
        }
        let (mx, my) = (x.measure(c).unwrap(), y.measure(c).unwrap());
        if mx.total() > my.total() + tol && infeasible.is_none() {
            infeasible = Some(format!(
                "mass of X({name}) is {} but mass of Y({name}) is {}",
                mx.total(),
                my.total()
            ));
        }
        let phi = kernels.phi[c.0].as_ref().unwrap();
        let (n, m) = kernels.shape[c.0];
        for j in 0..m {
            let row = (0..n).filter(|&i| !mx.get(i).is_zero()).map(|i| (phi[i * m + j], mx.get(i))).collect();
            model.add_constraint(format!("mdec_{name}[{j}]"), row, Relation::Le, my.get(j));
        }

        if x.metric(c).unwrap().is_discrete() {
            eliminated.push(format!("Pi_{name}: discrete metric on X({name})"));
            continue;
        }
        let (dx, dy) = (cost_vectors[c.0].0.as_ref().unwrap(), cost_vectors[c.0].1.as_ref().unwrap());
        for a in 0..n {
            for b in 0..n {
                let Some(bound) = dx[a * n + b].finite() else { continue };
                let vars: Vec<VarId> = (0..m * m)
                    .map(|k| model.add_var(format!("pi_{name}[{a},{b},{},{}]", k / m, k % m), None))
                    .collect();
                let mut dist_row = Vec::new();
                for (k, v) in vars.iter().enumerate() {
                    match dy[k] {
                        ExtReal::Inf => {
                            model.set_upper(*v, Some(T::zero()));
                            pinned.push(*v);
                        }
                        ExtReal::Finite(d) if !d.is_zero() => dist_row.push((*v, d)),
                        _ => {}
                    }
                }
                model.add_constraint(format!("short_{name}[{a},{b}]"), dist_row, Relation::Le, bound);
                for u in 0..m {
                    let mut left: Vec<(VarId, T)> = (0..m).map(|w| (vars[u * m + w], T::one())).collect();
                    left.push((phi[a * m + u], -T::one()));
                    model.add_constraint(format!("prod1_{name}[{a},{b},{u}]"), left, Relation::Eq, T::zero());
                    let mut right: Vec<(VarId, T)> = (0..m).map(|w| (vars[w * m + u], T::one())).collect();
                    right.push((phi[b * m + u], -T::one()));
                    model.add_constraint(format!("prod2_{name}[{a},{b},{u}]"), right, Relation::Eq, T::zero());
                }
                object_couplings.push(PairCoupling { object: c, pair: (a, b), vars });
            }
        }
    }

    let mut constant = ExtReal::zero();
    let mut generator_couplings = Vec::new();
    for g in th.generators() {
        let (c, cp) = (th.dom(g), th.cod(g));
        let gname = th.generator_name(g);
        let mu = x.measure(c).unwrap();
        let d = y.metric(cp).unwrap();
        let (xf, yf) = (x.map(g), y.map(g));
        let term = |model: &mut LpModel<T>, pinned: &mut Vec<VarId>, v: VarId, w: T, cost: ExtReal<T>| {
            if w.is_zero() {
                return;
            }
            match cost {
                ExtReal::Inf => {
                    model.set_upper(v, Some(T::zero()));
                    pinned.push(v);
                }
                ExtReal::Finite(k) => {
                    if !k.is_zero() {
                        model.add_objective(v, w * k);
                    }
                }
            }
        };
        match (x.is_fixed(c), x.is_fixed(cp)) {
            (true, true) => {
                eliminated.push(format!("Pi_{gname}: both ends fixed"));
                for i in 0..x.card(c) {
                    constant = constant + d.get(xf[i], yf[i]).powf(p).scale(mu.get(i));
                }
                generator_couplings.push(None);
            }
            (false, true) => {
                eliminated.push(format!("Pi_{gname}: closed form, codomain fixed"));
                for i in 0..x.card(c) {
                    for z in 0..y.card(c) {
                        let v = kernels.var(c, i, z).unwrap();
                        term(&mut model, &mut pinned, v, mu.get(i), d.get(xf[i], yf[z]).powf(p));
                    }
                }
                generator_couplings.push(None);
            }
            (true, false) => {
                eliminated.push(format!("Pi_{gname}: closed form, domain fixed"));
                for i in 0..x.card(c) {
                    for yp in 0..y.card(cp) {
                        let v = kernels.var(cp, xf[i], yp).unwrap();
                        term(&mut model, &mut pinned, v, mu.get(i), d.get(yp, yf[i]).powf(p));
                    }
                }
                generator_couplings.push(None);
            }
            (false, false) => {
                let m = y.card(cp);
                let vars: Vec<VarId> = (0..x.card(c) * m * m)
                    .map(|k| {
                        let (i, r) = (k / (m * m), k % (m * m));
                        model.add_var(format!("pi_{gname}[{i},{},{}]", r / m, r % m), None)
                    })
                    .collect();
                for i in 0..x.card(c) {
                    for a in 0..m {
                        for b in 0..m {
                            term(&mut model, &mut pinned, vars[i * m * m + a * m + b], mu.get(i), d.get(a, b).powf(p));
                        }
                    }
                    for u in 0..m {
                        let mut left: Vec<(VarId, T)> = (0..m).map(|w| (vars[i * m * m + u * m + w], T::one())).collect();
                        left.push((kernels.var(cp, xf[i], u).unwrap(), -T::one()));
                        model.add_constraint(format!("coup1_{gname}[{i},{u}]"), left, Relation::Eq, T::zero());
                        let mut right: Vec<(VarId, T)> = (0..m).map(|w| (vars[i * m * m + w * m + u], T::one())).collect();
                        for (z, _) in yf.iter().enumerate().filter(|(_, &t)| t == u) {
                            right.push((kernels.var(c, i, z).unwrap(), -T::one()));
                        }
                        model.add_constraint(format!("coup2_{gname}[{i},{u}]"), right, Relation::Eq, T::zero());
                    }
                }
                generator_couplings.push(Some(vars));
            }
        }
    }

    Ok(WassersteinProgram {
        model,
        layout: WassersteinLayout { kernels, object_couplings, generator_couplings },
        cost_vectors,
        eliminated,
        pinned,
        constant,
        infeasible,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WassersteinResult<T> {
    pub distance: ExtReal<T>,
    pub transformation: Option<MarkovTransformation<T>>,
}

/// `d_{W,p}(x, y)` and an optimal Markov transformation.
pub fn wasserstein_cset_distance<T: Real>(
    x: &Instance<T>,
    y: &Instance<T>,
    p: Order<T>,
    class: WassersteinClass,
) -> Result<WassersteinResult<T>> {
    let prog = wasserstein_cset_lp(x, y, p, class)?;
    let infinite = WassersteinResult { distance: ExtReal::Inf, transformation: None };
    if prog.infeasible.is_some() || prog.constant.is_inf() {
        return Ok(infinite);
    }
    let sol = solve(&prog.model)?;
    match sol.status {
        LpStatus::Infeasible => return Ok(infinite),
        LpStatus::Unbounded => return Err(Error::Inconsistent("Wasserstein program reported unbounded".into())),
        LpStatus::Optimal => {}
    }
    let phi = prog.layout.kernels.extract(&sol.values)?;
    if class == WassersteinClass::MmShort {
        let slack = T::from_f64(EXTRACT_TOL);
        for c in x.theory().objects().filter(|&c| !x.is_fixed(c)) {
            let pushed = phi.components[c.0].apply_measure(x.measure(c).unwrap())?;
            let cap = y.measure(c).unwrap();
            if pushed.weights().iter().zip(cap.weights()).any(|(a, b)| *a > *b + slack) {
                return Err(Error::Inconsistent(format!(
                    "extracted kernel on {} is not measure-decreasing",
                    x.theory().object_name(c)
                )));
            }
        }
    }
    let p = p.finite().unwrap();
    Ok(WassersteinResult { distance: prog.value_at(&sol.values).root(p), transformation: Some(phi) })
}

/// `(d_{W,p}, d_{H,p})`, checking `d_{W,p} <= d_{H,p} + 1e-6`.
pub fn relaxation_gap<T: Real>(
    x: &Instance<T>,
    y: &Instance<T>,
    p: Order<T>,
    cfg: &HausdorffConfig<T>,
) -> Result<(ExtReal<T>, ExtReal<T>)> {
    let mut hcfg = *cfg;
    hcfg.p = p;
    let w = wasserstein_cset_distance(x, y, p, WassersteinClass::MmShort)?.distance;
    let h = hausdorff_distance(x, y, &hcfg)?.distance;
    let slack = ExtReal::Finite(T::from_f64(1e-6));
    if w > h + slack {
        return Err(Error::RelaxationViolated { wasserstein: w.to_string(), hausdorff: h.to_string() });
    }
    Ok((w, h))
}

/// The configuration under which `d_{W,p}` relaxes `d_{H,p}`.
pub fn relaxation_config<T: Real>(p: Order<T>) -> HausdorffConfig<T> {
    HausdorffConfig::new(p, ComponentClass::MmShort)
}
