//! Two-phase revised simplex with an explicit dense basis inverse.
//!
//! Columns are stored sparsely. The basis inverse is updated by a product-form
//! pivot and rebuilt from scratch periodically (floating point only) to keep
//! round-off from accumulating. Anti-cycling follows Bland's rule; in the
//! default hybrid mode Dantzig pricing is used until a run of degenerate
//! pivots is seen, after which Bland's rule takes over until the objective
//! strictly improves again.

use super::{LpError, LpModel, LpSolution, LpStatus, Relation};
use crate::scalar::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pricing {
    /// Smallest-index entering and leaving variables throughout.
    Bland,
    /// Most negative reduced cost, falling back to Bland after this many
    /// consecutive degenerate pivots.
    Hybrid { degenerate_limit: usize },
}

#[derive(Clone, Debug)]
pub struct SolverOptions<T> {
    pub pivot_tol: T,
    pub feas_tol: T,
    pub opt_tol: T,
    pub pricing: Pricing,
    /// Defaults to a bound proportional to the problem size.
    pub max_iter: Option<usize>,
    /// Pivots between basis refactorizations; defaults to `max(100, rows)`.
    pub refactor_period: Option<usize>,
}

impl<T: Field> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            pivot_tol: T::pivot_tol(),
            feas_tol: T::feas_tol(),
            opt_tol: T::feas_tol() / T::from_usize(100),
            pricing: Pricing::Hybrid { degenerate_limit: 50 },
            max_iter: None,
            refactor_period: None,
        }
    }
}

pub fn solve<T: Field>(model: &LpModel<T>) -> Result<LpSolution<T>, LpError> {
    solve_with(model, &SolverOptions::default())
}

pub fn solve_with<T: Field>(model: &LpModel<T>, opts: &SolverOptions<T>) -> Result<LpSolution<T>, LpError> {
    model.validate()?;
    let mut t = Tableau::build(model, opts);
    let mut iterations = 0;

    if t.n_art > 0 {
        let cost: Vec<T> = (0..t.ncols).map(|j| if t.is_art(j) { T::one() } else { T::zero() }).collect();
        t.run(&cost, true, &mut iterations)?;
        t.refactor()?;
        let infeas = t.basis.iter().zip(&t.xb).filter(|(j, _)| t.is_art(**j)).fold(T::zero(), |a, (_, v)| a + v.clone());
        if infeas > opts.feas_tol {
            return Ok(LpSolution { status: LpStatus::Infeasible, objective: None, values: Vec::new(), iterations });
        }
        t.drive_out_artificials()?;
    }

    let mut cost = vec![T::zero(); t.ncols];
    for (v, c) in model.objective() {
        if let Some(j) = t.col_of[v.0] {
            cost[j] = cost[j].clone() + c.clone();
        }
    }
    if t.run(&cost, false, &mut iterations)? == Outcome::Unbounded {
        return Ok(LpSolution { status: LpStatus::Unbounded, objective: None, values: Vec::new(), iterations });
    }
    t.refactor()?;

    let mut values = vec![T::zero(); model.num_vars()];
    for (r, &j) in t.basis.iter().enumerate() {
        if j < t.n_struct {
            let v = t.xb[r].clone();
            values[t.struct_var[j]] = if v < T::zero() && v > -opts.feas_tol.clone() { T::zero() } else { v };
        }
    }
    let viol = model.max_violation(&values);
    if viol > opts.feas_tol {
        return Err(LpError::NumericBreakdown(format!("final solution violates constraints by {viol}")));
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective: Some(model.objective_value(&values)),
        values,
        iterations,
    })
}

#[derive(Debug, PartialEq, Eq)]
enum Outcome {
    Optimal,
    Unbounded,
}

struct Tableau<'o, T> {
    opts: &'o SolverOptions<T>,
    m: usize,
    ncols: usize,
    /// Structural columns come first, then slacks/surplus, then artificials.
    n_struct: usize,
    n_art: usize,
    cols: Vec<Vec<(usize, T)>>,
    b: Vec<T>,
    col_of: Vec<Option<usize>>,
    struct_var: Vec<usize>,
    basis: Vec<usize>,
    pos: Vec<Option<usize>>,
    binv: Vec<T>,
    xb: Vec<T>,
    since_refactor: usize,
}

impl<'o, T: Field> Tableau<'o, T> {
    fn build(model: &LpModel<T>, opts: &'o SolverOptions<T>) -> Self {
        // Variables with upper bound zero never become columns.
        let mut col_of = vec![None; model.num_vars()];
        let mut struct_var = Vec::new();
        for (i, v) in model.vars().iter().enumerate() {
            if v.upper.as_ref().map_or(true, |u| !u.is_zero()) {
                col_of[i] = Some(struct_var.len());
                struct_var.push(i);
            }
        }
        let n_struct = struct_var.len();

        let mut rows: Vec<(Vec<(usize, T)>, Relation, T)> = Vec::new();
        for c in model.constraints() {
            let coeffs: Vec<(usize, T)> = c
                .coeffs
                .iter()
                .filter(|(_, k)| !k.is_zero())
                .filter_map(|(v, k)| col_of[v.0].map(|j| (j, k.clone())))
                .collect();
            rows.push((coeffs, c.rel, c.rhs.clone()));
        }
        for (i, v) in model.vars().iter().enumerate() {
            if let (Some(j), Some(u)) = (col_of[i], &v.upper) {
                rows.push((vec![(j, T::one())], Relation::Le, u.clone()));
            }
        }
        for (coeffs, rel, rhs) in &mut rows {
            if *rhs < T::zero() {
                for (_, k) in coeffs.iter_mut() {
                    *k = -k.clone();
                }
                *rhs = -rhs.clone();
                *rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
        }

        let m = rows.len();
        let mut cols: Vec<Vec<(usize, T)>> = vec![Vec::new(); n_struct];
        for (r, (coeffs, _, _)) in rows.iter().enumerate() {
            for (j, k) in coeffs {
                cols[*j].push((r, k.clone()));
            }
        }
        let mut basis = vec![usize::MAX; m];
        for (r, (_, rel, _)) in rows.iter().enumerate() {
            match rel {
                Relation::Le => {
                    basis[r] = cols.len();
                    cols.push(vec![(r, T::one())]);
                }
                Relation::Ge => cols.push(vec![(r, -T::one())]),
                Relation::Eq => {}
            }
        }
        let n_art_start = cols.len();
        for (r, (_, rel, _)) in rows.iter().enumerate() {
            if *rel != Relation::Le {
                basis[r] = cols.len();
                cols.push(vec![(r, T::one())]);
            }
        }
        let ncols = cols.len();
        let mut pos = vec![None; ncols];
        for (r, &j) in basis.iter().enumerate() {
            pos[j] = Some(r);
        }
        let mut binv = vec![T::zero(); m * m];
        for r in 0..m {
            binv[r * m + r] = T::one();
        }
        let b: Vec<T> = rows.into_iter().map(|r| r.2).collect();
        Tableau {
            opts,
            m,
            ncols,
            n_struct,
            n_art: ncols - n_art_start,
            cols,
            xb: b.clone(),
            b,
            col_of,
            struct_var,
            basis,
            pos,
            binv,
            since_refactor: 0,
        }
    }

    fn is_art(&self, j: usize) -> bool {
        j >= self.ncols - self.n_art
    }

    fn max_iter(&self) -> usize {
        self.opts.max_iter.unwrap_or(1000 + 50 * (self.m + self.ncols))
    }

    fn refactor_period(&self) -> usize {
        self.opts.refactor_period.unwrap_or(self.m.max(100))
    }

    /// `y = c_B^T B^{-1}`.
    fn duals(&self, cost: &[T]) -> Vec<T> {
        let m = self.m;
        let mut y = vec![T::zero(); m];
        for (i, &j) in self.basis.iter().enumerate() {
            let c = &cost[j];
            if c.is_zero() {
                continue;
            }
            let row = &self.binv[i * m..(i + 1) * m];
            for (yk, bk) in y.iter_mut().zip(row) {
                if !bk.is_zero() {
                    *yk = yk.clone() + c.clone() * bk.clone();
                }
            }
        }
        y
    }

    fn reduced_cost(&self, cost: &[T], y: &[T], j: usize) -> T {
        self.cols[j].iter().fold(cost[j].clone(), |a, (r, k)| a - y[*r].clone() * k.clone())
    }

    /// `B^{-1} a_j`.
    fn ftran(&self, j: usize) -> Vec<T> {
        let m = self.m;
        let mut u = vec![T::zero(); m];
        for (k, a) in &self.cols[j] {
            for (i, ui) in u.iter_mut().enumerate() {
                let bik = &self.binv[i * m + k];
                if !bik.is_zero() {
                    *ui = ui.clone() + bik.clone() * a.clone();
                }
            }
        }
        u
    }

    fn run(&mut self, cost: &[T], phase_one: bool, iterations: &mut usize) -> Result<Outcome, LpError> {
        let opt_tol = self.opts.opt_tol.clone();
        let piv_tol = self.opts.pivot_tol.clone();
        let mut degenerate_run = 0usize;
        loop {
            if *iterations >= self.max_iter() {
                return Err(LpError::IterationLimit(self.max_iter()));
            }
            let bland = match self.opts.pricing {
                Pricing::Bland => true,
                Pricing::Hybrid { degenerate_limit } => degenerate_run >= degenerate_limit,
            };
            let y = self.duals(cost);
            let mut entering: Option<(usize, T)> = None;
            for j in 0..self.ncols {
                if self.pos[j].is_some() || (!phase_one && self.is_art(j)) {
                    continue;
                }
                let d = self.reduced_cost(cost, &y, j);
                if d < -opt_tol.clone() {
                    if bland {
                        entering = Some((j, d));
                        break;
                    }
                    if entering.as_ref().map_or(true, |(_, best)| d < *best) {
                        entering = Some((j, d));
                    }
                }
            }
            let Some((q, _)) = entering else { return Ok(Outcome::Optimal) };

            let u = self.ftran(q);
            let mut leave: Option<(usize, T)> = None;
            for (r, ur) in u.iter().enumerate() {
                if *ur <= piv_tol {
                    continue;
                }
                let xr = if self.xb[r] < T::zero() { T::zero() } else { self.xb[r].clone() };
                let ratio = xr / ur.clone();
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((s, best)) => {
                        let tie = (ratio.clone() - best.clone()).abs() <= piv_tol;
                        let better = if tie {
                            if bland {
                                self.basis[r] < self.basis[s]
                            } else {
                                u[r].abs() > u[s].abs()
                            }
                        } else {
                            ratio < best
                        };
                        if better {
                            Some((r, ratio))
                        } else {
                            Some((s, best))
                        }
                    }
                };
            }
            let Some((r, step)) = leave else {
                if phase_one {
                    return Err(LpError::NumericBreakdown("phase one reported unbounded".into()));
                }
                return Ok(Outcome::Unbounded);
            };
            if step <= self.opts.feas_tol.clone() * T::from_f64(1e-3) {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, q, &u)?;
            *iterations += 1;
        }
    }

    fn pivot(&mut self, r: usize, q: usize, u: &[T]) -> Result<(), LpError> {
        let m = self.m;
        let piv = u[r].clone();
        if piv.is_zero() {
            return Err(LpError::NumericBreakdown("zero pivot".into()));
        }
        let t = self.xb[r].clone() / piv.clone();
        for (i, ui) in u.iter().enumerate() {
            if i != r && !ui.is_zero() {
                let v = self.xb[i].clone() - ui.clone() * t.clone();
                self.xb[i] = if v < T::zero() && v > -self.opts.feas_tol.clone() { T::zero() } else { v };
            }
        }
        self.xb[r] = t;

        let (before, rest) = self.binv.split_at_mut(r * m);
        let (prow, after) = rest.split_at_mut(m);
        for v in prow.iter_mut() {
            if !v.is_zero() {
                *v = v.clone() / piv.clone();
            }
        }
        let update = |row: &mut [T], ui: &T| {
            for (a, p) in row.iter_mut().zip(prow.iter()) {
                if !p.is_zero() {
                    *a = a.clone() - ui.clone() * p.clone();
                }
            }
        };
        for (i, row) in before.chunks_mut(m).enumerate() {
            if !u[i].is_zero() {
                update(row, &u[i]);
            }
        }
        for (i, row) in after.chunks_mut(m).enumerate() {
            let ui = &u[r + 1 + i];
            if !ui.is_zero() {
                update(row, ui);
            }
        }

        let old = self.basis[r];
        self.pos[old] = None;
        self.basis[r] = q;
        self.pos[q] = Some(r);
        self.since_refactor += 1;
        if !T::is_exact() && self.since_refactor >= self.refactor_period() {
            self.refactor()?;
        }
        Ok(())
    }

    /// Recomputes `B^{-1}` by Gauss-Jordan elimination and `x_B = B^{-1} b`.
    fn refactor(&mut self) -> Result<(), LpError> {
        self.since_refactor = 0;
        if T::is_exact() {
            return Ok(());
        }
        let m = self.m;
        let mut a = vec![T::zero(); m * m];
        for (c, &j) in self.basis.iter().enumerate() {
            for (r, k) in &self.cols[j] {
                a[r * m + c] = k.clone();
            }
        }
        let mut inv = vec![T::zero(); m * m];
        for i in 0..m {
            inv[i * m + i] = T::one();
        }
        for col in 0..m {
            let p = (col..m)
                .max_by(|&i, &k| a[i * m + col].abs().partial_cmp(&a[k * m + col].abs()).unwrap())
                .filter(|&i| a[i * m + col].abs() > self.opts.pivot_tol)
                .ok_or_else(|| LpError::NumericBreakdown("singular basis".into()))?;
            if p != col {
                for k in 0..m {
                    a.swap(p * m + k, col * m + k);
                    inv.swap(p * m + k, col * m + k);
                }
            }
            let d = a[col * m + col].clone();
            for k in 0..m {
                a[col * m + k] = a[col * m + k].clone() / d.clone();
                inv[col * m + k] = inv[col * m + k].clone() / d.clone();
            }
            for i in 0..m {
                let f = a[i * m + col].clone();
                if i == col || f.is_zero() {
                    continue;
                }
                for k in 0..m {
                    let (ak, ik) = (a[col * m + k].clone(), inv[col * m + k].clone());
                    if !ak.is_zero() {
                        a[i * m + k] = a[i * m + k].clone() - f.clone() * ak;
                    }
                    if !ik.is_zero() {
                        inv[i * m + k] = inv[i * m + k].clone() - f.clone() * ik;
                    }
                }
            }
        }
        // Row `c` of the inverse of B (columns = basis) gives basic variable c.
        self.binv = inv;
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            let v = row.iter().zip(&self.b).fold(T::zero(), |s, (x, y)| s + x.clone() * y.clone());
            self.xb[i] = if v < T::zero() && v > -self.opts.feas_tol.clone() { T::zero() } else { v };
        }
        Ok(())
    }

    /// Pivots basic artificials (all at zero after phase one) out of the
    /// basis where possible; the remaining ones sit on redundant rows.
    fn drive_out_artificials(&mut self) -> Result<(), LpError> {
        let m = self.m;
        for r in 0..m {
            if !self.is_art(self.basis[r]) {
                continue;
            }
            let mut best: Option<(usize, T)> = None;
            for j in 0..self.ncols {
                if self.pos[j].is_some() || self.is_art(j) {
                    continue;
                }
                let v = self.cols[j]
                    .iter()
                    .fold(T::zero(), |s, (k, a)| s + self.binv[r * m + k].clone() * a.clone())
                    .abs();
                if v > self.opts.pivot_tol.clone() * T::from_usize(1000)
                    && best.as_ref().map_or(true, |(_, b)| v > *b)
                {
                    best = Some((j, v));
                }
            }
            if let Some((q, _)) = best {
                let u = self.ftran(q);
                self.xb[r] = T::zero();
                self.pivot(r, q, &u)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::VarId;
    use num_rational::BigRational;

    fn min_x_ge_1() -> LpModel<f64> {
        let mut m = LpModel::new();
        let x = m.add_var("x", None);
        m.add_objective(x, 1.0);
        m.add_constraint("c1", vec![(x, 1.0)], Relation::Ge, 1.0);
        m
    }

    #[test]
    fn trivial_optimum() {
        let s = solve(&min_x_ge_1()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contradictory_equalities() {
        let mut m = LpModel::<f64>::new();
        let x = m.add_var("x", None);
        m.add_constraint("a", vec![(x, 1.0)], Relation::Eq, 1.0);
        m.add_constraint("b", vec![(x, 1.0)], Relation::Eq, 2.0);
        assert_eq!(solve(&m).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded() {
        let mut m = LpModel::<f64>::new();
        let x = m.add_var("x", None);
        let y = m.add_var("y", None);
        m.add_objective(x, -1.0);
        m.add_constraint("a", vec![(x, 1.0), (y, -1.0)], Relation::Le, 1.0);
        assert_eq!(solve(&m).unwrap().status, LpStatus::Unbounded);
    }

    fn transport_2x2<T: Field>() -> LpModel<T> {
        let tenth = |k: usize| T::from_usize(k) / T::from_usize(10);
        let mu = [tenth(7), tenth(3)];
        let nu = [tenth(4), tenth(6)];
        let mut m = LpModel::new();
        let v: Vec<VarId> = (0..4).map(|k| m.add_var(format!("p{k}"), None)).collect();
        for i in 0..2 {
            for j in 0..2 {
                if i != j {
                    m.add_objective(v[2 * i + j], T::one());
                }
            }
            m.add_constraint(format!("r{i}"), vec![(v[2 * i], T::one()), (v[2 * i + 1], T::one())], Relation::Eq, mu[i].clone());
            m.add_constraint(format!("c{i}"), vec![(v[i], T::one()), (v[2 + i], T::one())], Relation::Eq, nu[i].clone());
        }
        m
    }

    #[test]
    fn small_transport_problem() {
        let s = solve(&transport_2x2::<f64>()).unwrap();
        assert!((s.objective.unwrap() - 0.3).abs() < 1e-9);
        let exact = solve(&transport_2x2::<BigRational>()).unwrap();
        assert_eq!(exact.objective.unwrap(), BigRational::new(3.into(), 10.into()));
        let single = solve(&transport_2x2::<f32>()).unwrap();
        assert!((single.objective.unwrap() - 0.3).abs() < 1e-5);
    }

    #[test]
    fn upper_bounds_and_fixed_variables() {
        let mut m = LpModel::<f64>::new();
        let x = m.add_var("x", Some(2.0));
        let y = m.add_var("y", Some(0.0));
        m.add_objective(x, -1.0);
        m.add_objective(y, -5.0);
        let s = solve(&m).unwrap();
        assert_eq!(s.values, [2.0, 0.0]);
        m.add_constraint("need_y", vec![(y, 1.0)], Relation::Ge, 1.0);
        assert_eq!(solve(&m).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn redundant_equalities() {
        let mut m = LpModel::<f64>::new();
        let x = m.add_var("x", None);
        let y = m.add_var("y", None);
        m.add_objective(x, 1.0);
        m.add_constraint("a", vec![(x, 1.0), (y, 1.0)], Relation::Eq, 1.0);
        m.add_constraint("b", vec![(x, 2.0), (y, 2.0)], Relation::Eq, 2.0);
        m.add_constraint("c", vec![(x, -1.0), (y, -1.0)], Relation::Eq, -1.0);
        let s = solve(&m).unwrap();
        assert!(s.objective.unwrap().abs() < 1e-12);
        assert!((s.values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pricing_rules_agree_and_are_deterministic() {
        let m = transport_2x2::<f64>();
        let bland = SolverOptions { pricing: Pricing::Bland, ..SolverOptions::default() };
        let a = solve_with(&m, &bland).unwrap();
        let b = solve(&m).unwrap();
        assert!((a.objective.unwrap() - b.objective.unwrap()).abs() < 1e-12);
        assert_eq!(solve(&m).unwrap(), b);
    }
}
