//! Optimal transport between finite measures and the Wasserstein metric on
//! finite Markov kernels.
//!
//! Infinite costs are handled structurally: the corresponding coupling cells
//! are fixed at zero before solving, and an infeasible program means the
//! transport cost is infinite.

use crate::error::{check_dim, Error, Result};
use crate::ext::{ExtReal, Order};
use crate::lp::{solve, LpModel, LpStatus, Relation, VarId};
use crate::markov::{FiniteKernel, JointMeasure};
use crate::mm::{MeasureData, MetricData};
use crate::scalar::{Field, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct OtResult<T> {
    pub cost: ExtReal<T>,
    /// Absent when the cost is infinite.
    pub coupling: Option<JointMeasure<T>>,
}

/// Kernel transport: the aggregated cost and one optimal coupling per row.
/// Rows of zero measure are skipped and carry no coupling.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelOtResult<T> {
    pub cost: ExtReal<T>,
    pub row_couplings: Vec<Option<JointMeasure<T>>>,
}

fn finite_order<T: Real>(p: Order<T>, what: &str) -> Result<T> {
    p.finite().ok_or_else(|| {
        Error::UnsupportedOrder(format!("{what} needs a finite order p; for p = inf the problem is not linear"))
    })
}

/// Minimizes `Σ cost·π` over couplings `π` of `mu` and `nu`. `cost` is
/// `|mu| × |nu|`, row-major.
pub fn optimal_coupling<T: Real>(
    mu: &MeasureData<T>,
    nu: &MeasureData<T>,
    cost: &[ExtReal<T>],
) -> Result<OtResult<T>> {
    let (n, m) = (mu.len(), nu.len());
    check_dim("cost matrix", n * m, cost.len())?;
    let (a, b) = (mu.total(), nu.total());
    if (a - b).abs() > T::cmp_tol() * T::one().max(a.max(b)) {
        return Err(Error::MassMismatch { left: Field::to_f64(&a), right: Field::to_f64(&b) });
    }

    let mut lp = LpModel::<T>::new();
    let vars: Vec<VarId> = (0..n * m)
        .map(|k| {
            let upper = if cost[k].is_inf() { Some(T::zero()) } else { None };
            lp.add_var(format!("pi[{},{}]", k / m, k % m), upper)
        })
        .collect();
    for (k, c) in cost.iter().enumerate() {
        if let Some(c) = c.finite() {
            if !c.is_zero() {
                lp.add_objective(vars[k], c);
            }
        }
    }
    for i in 0..n {
        lp.add_constraint(format!("row[{i}]"), (0..m).map(|j| (vars[i * m + j], T::one())).collect(), Relation::Eq, mu.get(i));
    }
    for j in 0..m {
        lp.add_constraint(format!("col[{j}]"), (0..n).map(|i| (vars[i * m + j], T::one())).collect(), Relation::Eq, nu.get(j));
    }
    let sol = solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => {
            // Entries at round-off scale are simplex residue; left in, they
            // surface as ~1e-8 noise once the p-th root is taken.
            let floor = T::epsilon() * T::from_usize(16 * n * m) * T::one().max(a);
            let pi: Vec<T> = sol.values.iter().map(|&v| if v <= floor { T::zero() } else { v }).collect();
            let total = pi
                .iter()
                .zip(cost)
                .fold(T::zero(), |s, (x, c)| s + c.finite().map_or(T::zero(), |c| c * *x));
            Ok(OtResult { cost: ExtReal::Finite(total.max(T::zero())), coupling: Some(JointMeasure::new(n, m, pi)?) })
        }
        LpStatus::Infeasible => Ok(OtResult { cost: ExtReal::Inf, coupling: None }),
        LpStatus::Unbounded => Err(Error::Inconsistent("transport program reported unbounded".into())),
    }
}

/// `W_p(mu, nu)` with ground metric `d`.
pub fn wasserstein_measures<T: Real>(
    mu: &MeasureData<T>,
    nu: &MeasureData<T>,
    d: &MetricData<T>,
    p: Order<T>,
) -> Result<ExtReal<T>> {
    let p = finite_order(p, "wasserstein_measures")?;
    check_dim("ground metric", mu.len(), d.len())?;
    check_dim("ground metric", nu.len(), d.len())?;
    Ok(optimal_coupling(mu, nu, &d.powf(p))?.cost.root(p))
}

/// `W_p(M, N) = (Σ_x μ(x) W_p(M(x), N(x))^p)^{1/p}`, one transport problem
/// per row.
pub fn wasserstein_kernels<T: Real>(
    m: &FiniteKernel<T>,
    n: &FiniteKernel<T>,
    mu_x: &MeasureData<T>,
    dy: &MetricData<T>,
    p: Order<T>,
) -> Result<KernelOtResult<T>> {
    let p = finite_order(p, "wasserstein_kernels")?;
    check_dim("kernel rows", m.rows(), n.rows())?;
    check_dim("kernel rows", m.rows(), mu_x.len())?;
    check_dim("kernel columns", m.cols(), n.cols())?;
    check_dim("kernel columns", m.cols(), dy.len())?;
    let cost = dy.powf(p);
    let mut total = ExtReal::zero();
    let mut row_couplings = Vec::with_capacity(m.rows());
    for x in 0..m.rows() {
        if mu_x.get(x).is_zero() {
            row_couplings.push(None);
            continue;
        }
        let a = MeasureData::new(m.row(x).to_vec())?;
        let b = MeasureData::new(n.row(x).to_vec())?;
        let r = optimal_coupling(&a, &b, &cost)?;
        total = total + r.cost.scale(mu_x.get(x));
        row_couplings.push(r.coupling);
    }
    Ok(KernelOtResult { cost: total.root(p), row_couplings })
}

/// Closed form for `W_p(f, M g)` with `f: X -> Z` and `g: Y -> Z`
/// deterministic: `(Σ_x Σ_y μ(x) M(y|x) d_Z(f x, g y)^p)^{1/p}`. For
/// `p = ∞` the supremum over the supports.
pub fn wasserstein_deterministic<T: Real>(
    f: &[usize],
    m: &FiniteKernel<T>,
    g: &[usize],
    mu_x: &MeasureData<T>,
    dz: &MetricData<T>,
    p: Order<T>,
) -> Result<ExtReal<T>> {
    check_dim("closed form: f", m.rows(), f.len())?;
    check_dim("closed form: g", m.cols(), g.len())?;
    check_dim("closed form: measure", m.rows(), mu_x.len())?;
    if let Some(&z) = f.iter().chain(g).find(|&&z| z >= dz.len()) {
        return Err(Error::Dimension { context: "closed form codomain".into(), expected: dz.len(), found: z + 1 });
    }
    let mut acc = ExtReal::zero();
    for (x, &fx) in f.iter().enumerate() {
        let w = mu_x.get(x);
        if w.is_zero() {
            continue;
        }
        for (y, &gy) in g.iter().enumerate() {
            let k = m.get(x, y);
            if k.is_zero() {
                continue;
            }
            let d = dz.get(fx, gy);
            acc = match p {
                Order::Finite(p) => acc + d.powf(p).scale(w * k),
                Order::Infinity => acc.max(d),
            };
        }
    }
    Ok(match p {
        Order::Finite(p) => acc.root(p),
        Order::Infinity => acc,
    })
}

/// Glues `π12` on `X × Y` and `π23` on `Y × Z` along their common marginal on
/// `Y`: `π(x, y, z) = π12(x, y) π23(y, z) / ν(y)`, indexed `(x * |Y| + y) * |Z| + z`.
pub fn glue<T: Real>(pi12: &JointMeasure<T>, pi23: &JointMeasure<T>) -> Result<Vec<T>> {
    let (nx, ny) = pi12.shape();
    let (ny2, nz) = pi23.shape();
    check_dim("gluing along the middle factor", ny, ny2)?;
    let nu = pi23.first_marginal();
    let mut out = vec![T::zero(); nx * ny * nz];
    for x in 0..nx {
        for y in 0..ny {
            if nu[y] <= T::zero() {
                continue;
            }
            for z in 0..nz {
                out[(x * ny + y) * nz + z] = pi12.get(x, y) * pi23.get(y, z) / nu[y];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::embed_function;
    use crate::mm::lp_distance;

    fn line(n: usize) -> MetricData<f64> {
        MetricData::from_rows(
            (0..n).map(|i| (0..n).map(|j| ExtReal::Finite((i as f64 - j as f64).abs())).collect()).collect(),
        )
        .unwrap()
    }

    fn meas(w: &[f64]) -> MeasureData<f64> {
        MeasureData::new(w.to_vec()).unwrap()
    }

    #[test]
    fn two_by_two() {
        let c = [0.0, 1.0, 1.0, 0.0].map(ExtReal::Finite);
        let r = optimal_coupling(&meas(&[0.7, 0.3]), &meas(&[0.4, 0.6]), &c).unwrap();
        assert!(r.cost.approx_eq(&ExtReal::Finite(0.3), 1e-9));
        let pi = r.coupling.unwrap();
        assert!((pi.get(0, 0) - 0.4).abs() < 1e-9 && (pi.get(1, 1) - 0.3).abs() < 1e-9);
    }

    #[test]
    fn identity_and_infinite_costs() {
        let mu = meas(&[0.2, 0.5, 0.3]);
        let r = optimal_coupling(&mu, &mu, &line(3).powf(1.0)).unwrap();
        assert_eq!(r.cost.finite().map(|c| c.abs() < 1e-12), Some(true));
        let r = optimal_coupling(&meas(&[1.0]), &meas(&[1.0]), &[ExtReal::Inf]).unwrap();
        assert!(r.cost.is_inf() && r.coupling.is_none());
        assert!(matches!(
            optimal_coupling(&meas(&[1.0]), &meas(&[2.0]), &[ExtReal::zero()]),
            Err(Error::MassMismatch { .. })
        ));
    }

    #[test]
    fn classical_wasserstein() {
        let d = line(3);
        let p1 = Order::one();
        let w = wasserstein_measures(&meas(&[0.5, 0.5, 0.0]), &meas(&[0.0, 0.5, 0.5]), &d, p1).unwrap();
        assert!(w.approx_eq(&ExtReal::Finite(1.0), 1e-9));
        let w = wasserstein_measures(&MeasureData::point_mass(3, 0), &MeasureData::point_mass(3, 2), &d, p1).unwrap();
        assert!(w.approx_eq(&ExtReal::Finite(2.0), 1e-9));
        assert!(wasserstein_measures(&meas(&[1.0]), &meas(&[1.0]), &line(1), Order::Infinity).is_err());
    }

    #[test]
    fn deterministic_kernels_reduce_to_lp_distance() {
        let d = line(4);
        let mu = meas(&[1.0, 0.5, 2.0]);
        let (f, g) = ([0, 3, 1], [2, 3, 0]);
        let p = Order::new(2.0).unwrap();
        let (mf, mg) = (embed_function::<f64>(&f, 4).unwrap(), embed_function::<f64>(&g, 4).unwrap());
        let w = wasserstein_kernels(&mf, &mg, &mu, &d, p).unwrap().cost;
        let l = lp_distance(&f, &g, &mu, &d, p).unwrap();
        assert!(w.approx_eq(&l, 1e-7), "{w} vs {l}");

        let closed = wasserstein_deterministic(&f, &FiniteKernel::identity(3), &g, &mu, &d, p).unwrap();
        assert!(closed.approx_eq(&l, 1e-12));
    }

    #[test]
    fn closed_form_against_lp_path() {
        let d = line(3);
        let mu = meas(&[1.0, 1.0]);
        let m = FiniteKernel::uniform(2, 3);
        let (f, g) = ([0, 0], [0, 1, 2]);
        let closed = wasserstein_deterministic(&f, &m, &g, &mu, &d, Order::one()).unwrap();
        assert!(closed.approx_eq(&ExtReal::Finite(2.0), 1e-12));
        let mf = embed_function::<f64>(&f, 3).unwrap();
        let mg = crate::markov::compose_kernels(&m, &embed_function(&g, 3).unwrap()).unwrap();
        let lp = wasserstein_kernels(&mf, &mg, &mu, &d, Order::one()).unwrap().cost;
        assert!(closed.approx_eq(&lp, 1e-7));
    }

    #[test]
    fn gluing_preserves_marginals() {
        let pi12 = JointMeasure::from_rows(2, vec![vec![0.1, 0.3], vec![0.2, 0.4]]).unwrap();
        let pi23 = JointMeasure::from_rows(3, vec![vec![0.3, 0.0, 0.0], vec![0.2, 0.2, 0.3]]).unwrap();
        let g = glue(&pi12, &pi23).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                let s: f64 = (0..3).map(|z| g[(x * 2 + y) * 3 + z]).sum();
                assert!((s - pi12.get(x, y)).abs() < 1e-12);
            }
        }
        for y in 0..2 {
            for z in 0..3 {
                let s: f64 = (0..2).map(|x| g[(x * 2 + y) * 3 + z]).sum();
                assert!((s - pi23.get(y, z)).abs() < 1e-12);
            }
        }
    }
}
