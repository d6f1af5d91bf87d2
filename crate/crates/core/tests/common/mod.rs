//! Random instance generators and brute-force oracles shared by the
//! integration tests. Oracles here never call the simplex solver.

#![allow(dead_code)]

use cset_transport::builtins::{attributed_set, discrete_graph, line_metric, vertex_attributed_graph, weak_graph};
use cset_transport::lp::{LpStatus, Relation};
use cset_transport::LpModel;
use cset_transport::{FiniteKernel, Instance, MeasureData, MetricData};
use cset_transport::ext::ExtReal;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_edges(rng: &mut TestRng, nv: usize, ne: usize) -> Vec<(usize, usize)> {
    (0..ne).map(|_| (rng.gen_range(0..nv), rng.gen_range(0..nv))).collect()
}

/// A graph with discrete metrics and counting measures.
pub fn random_graph(rng: &mut TestRng, max_v: usize, max_e: usize) -> Instance {
    let nv = rng.gen_range(1..=max_v);
    let ne = rng.gen_range(0..=max_e);
    discrete_graph(nv, &random_edges(rng, nv, ne)).unwrap()
}

/// A graph with the shortest-path metric on vertices.
pub fn random_weak_graph(rng: &mut TestRng, nv: usize, ne: usize) -> Instance {
    weak_graph(nv, &random_edges(rng, nv, ne)).unwrap()
}

/// Positive weights in `[0.1, 1.1)`.
pub fn random_weights(rng: &mut TestRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| 0.1 + rng.gen::<f64>()).collect()
}

pub fn random_probability(rng: &mut TestRng, n: usize) -> Vec<f64> {
    let w = random_weights(rng, n);
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Row-stochastic, with some exact zeros.
pub fn random_kernel(rng: &mut TestRng, rows: usize, cols: usize) -> FiniteKernel {
    let mut p = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let mut r: Vec<f64> = (0..cols).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen::<f64>() }).collect();
        if r.iter().all(|v| *v == 0.0) {
            r[rng.gen_range(0..cols)] = 1.0;
        }
        let s: f64 = r.iter().sum();
        p.extend(r.into_iter().map(|v| v / s));
    }
    FiniteKernel::new(rows, cols, p).unwrap()
}

/// Shortest paths over random positive weights: a finite metric, symmetric
/// when asked.
pub fn random_metric(rng: &mut TestRng, n: usize, symmetric: bool) -> MetricData {
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j && (!symmetric || i < j) {
                w[i * n + j] = 0.5 + 4.0 * rng.gen::<f64>();
                if symmetric {
                    w[j * n + i] = w[i * n + j];
                }
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if w[i * n + k] + w[k * n + j] < w[i * n + j] {
                    w[i * n + j] = w[i * n + k] + w[k * n + j];
                }
            }
        }
    }
    MetricData::new(n, w.into_iter().map(ExtReal::Finite).collect()).unwrap()
}

pub fn line(n: usize) -> MetricData {
    line_metric(&(0..n).map(|i| i as f64).collect::<Vec<_>>())
}

pub fn random_attributed_set(rng: &mut TestRng, n: usize, points: usize, probability: bool) -> Instance {
    let attr: Vec<usize> = (0..n).map(|_| rng.gen_range(0..points)).collect();
    let mu = if probability { random_probability(rng, n) } else { vec![1.0; n] };
    attributed_set(&attr, line(points), MeasureData::new(mu).unwrap()).unwrap()
}

/// Vertex-attributed graph over `0..points` on the line, counting measures.
pub fn random_vgraph(rng: &mut TestRng, nv: usize, ne: usize, points: usize) -> Instance {
    let edges = random_edges(rng, nv, ne);
    let attr: Vec<usize> = (0..nv).map(|_| rng.gen_range(0..points)).collect();
    vertex_attributed_graph(nv, &edges, &attr, line(points), MeasureData::counting(nv), MeasureData::counting(ne))
        .unwrap()
}

/// Every function `0..n -> 0..m`, as vectors.
pub fn all_functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|f| (0..m).map(move |v| [f.clone(), vec![v]].concat())).collect();
    }
    out
}

/// Is `phi_v` (with some edge map) a graph homomorphism `x -> y`? Brute force
/// over edge maps.
pub fn graph_hom_exists_with_vertices(xe: &[(usize, usize)], ye: &[(usize, usize)], phi_v: &[usize]) -> bool {
    xe.iter().all(|&(s, t)| ye.iter().any(|&(a, b)| a == phi_v[s] && b == phi_v[t]))
}

// ---- LP oracle by vertex enumeration ----

#[derive(Clone, Debug, PartialEq)]
pub enum OracleResult {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

/// `min c·x` over `{x >= 0 : le rows, eq rows}` by enumerating every choice
/// of `n` linearly independent active constraints. Returns the best vertex,
/// or `None` when the polyhedron is empty (it is pointed, as `x >= 0`).
fn best_vertex(n: usize, c: &[f64], le: &[(Vec<f64>, f64)], eq: &[(Vec<f64>, f64)]) -> Option<(f64, Vec<f64>)> {
    let tol = 1e-7;
    if n == 0 {
        let ok = le.iter().all(|(_, b)| *b >= -tol) && eq.iter().all(|(_, b)| b.abs() <= tol);
        return ok.then(|| (0.0, Vec::new()));
    }
    let mut rows: Vec<(Vec<f64>, f64)> = eq.to_vec();
    rows.extend(le.iter().cloned());
    for j in 0..n {
        let mut a = vec![0.0; n];
        a[j] = -1.0;
        rows.push((a, 0.0));
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for set in choose(rows.len(), n) {
        let a = set.iter().map(|&i| rows[i].0.clone()).collect();
        let b = set.iter().map(|&i| rows[i].1).collect();
        let Some(x) = solve_square(a, b) else { continue };
        let feasible = x.iter().all(|v| *v >= -tol)
            && le.iter().all(|(a, b)| dot(a, &x) <= b + tol)
            && eq.iter().all(|(a, b)| (dot(a, &x) - b).abs() <= tol);
        if feasible {
            let v = dot(c, &x);
            if best.as_ref().map_or(true, |(bv, _)| v < *bv) {
                best = Some((v, x));
            }
        }
    }
    best
}

fn dot(a: &[f64], x: &[f64]) -> f64 {
    a.iter().zip(x).map(|(u, v)| u * v).sum()
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn choose(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for k in col..n {
                        a[r][k] -= f * a[col][k];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Classifies and solves `model` by enumerating basic solutions.
pub fn lp_oracle(model: &LpModel) -> OracleResult {
    let n = model.num_vars();
    let mut c = vec![0.0; n];
    for (v, k) in model.objective() {
        c[v.0] += k;
    }
    let mut le = Vec::new();
    let mut eq = Vec::new();
    let mut cone_le = Vec::new();
    let mut cone_eq = Vec::new();
    for con in model.constraints() {
        let mut a = vec![0.0; n];
        for (v, k) in &con.coeffs {
            a[v.0] += k;
        }
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        match con.rel {
            Relation::Le => {
                le.push((a.clone(), con.rhs));
                cone_le.push((a, 0.0));
            }
            Relation::Ge => {
                le.push((neg.clone(), -con.rhs));
                cone_le.push((neg, 0.0));
            }
            Relation::Eq => {
                eq.push((a.clone(), con.rhs));
                cone_eq.push((a, 0.0));
            }
        }
    }
    for (j, var) in model.vars().iter().enumerate() {
        if let Some(u) = var.upper {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            le.push((a.clone(), u));
            cone_eq.push((a, 0.0));
        }
    }
    let Some((best, _)) = best_vertex(n, &c, &le, &eq) else { return OracleResult::Infeasible };
    // Unbounded iff some normalized recession direction improves the objective.
    cone_eq.push((vec![1.0; n], 1.0));
    if let Some((v, _)) = best_vertex(n, &c, &cone_le, &cone_eq) {
        if v < -1e-9 {
            return OracleResult::Unbounded;
        }
    }
    OracleResult::Optimal(best)
}

pub fn classify(status: LpStatus) -> &'static str {
    match status {
        LpStatus::Optimal => "optimal",
        LpStatus::Infeasible => "infeasible",
        LpStatus::Unbounded => "unbounded",
    }
}

/// A random LP with integer data, up to `max_n` variables and `max_m` rows.
pub fn random_lp(rng: &mut TestRng, max_n: usize, max_m: usize) -> LpModel {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m);
    let mut model = LpModel::new();
    let vars: Vec<_> = (0..n)
        .map(|j| {
            let upper = match rng.gen_range(0..10) {
                0 => Some(0.0),
                1 => Some(rng.gen_range(1..=5) as f64),
                _ => None,
            };
            model.add_var(format!("x{j}"), upper)
        })
        .collect();
    for &v in &vars {
        let c = rng.gen_range(-5..=5) as f64;
        if c != 0.0 {
            model.add_objective(v, c);
        }
    }
    for i in 0..m {
        let mut coeffs = Vec::new();
        for &v in &vars {
            let c = rng.gen_range(-5..=5) as f64;
            if rng.gen_bool(0.7) && c != 0.0 {
                coeffs.push((v, c));
            }
        }
        let rel = match rng.gen_range(0..4) {
            0 => Relation::Eq,
            1 => Relation::Ge,
            _ => Relation::Le,
        };
        model.add_constraint(format!("r{i}"), coeffs, rel, rng.gen_range(-6..=10) as f64);
    }
    model
}

/// `W_p(mu, nu)^p` by vertex enumeration of the transportation polytope.
pub fn ot_oracle(mu: &[f64], nu: &[f64], d: &MetricData, p: f64) -> f64 {
    let (n, m) = (mu.len(), nu.len());
    let mut model = LpModel::new();
    let vars: Vec<_> = (0..n * m).map(|k| model.add_var(format!("t{k}"), None)).collect();
    for k in 0..n * m {
        let c = d.get(k / m, k % m).finite().unwrap().powf(p);
        if c != 0.0 {
            model.add_objective(vars[k], c);
        }
    }
    // The last column constraint is implied; dropping it keeps the system
    // square-solvable without redundancy.
    for i in 0..n {
        model.add_constraint(format!("r{i}"), (0..m).map(|j| (vars[i * m + j], 1.0)).collect(), Relation::Eq, mu[i]);
    }
    for j in 0..m - 1 {
        model.add_constraint(format!("c{j}"), (0..n).map(|i| (vars[i * m + j], 1.0)).collect(), Relation::Eq, nu[j]);
    }
    match lp_oracle(&model) {
        OracleResult::Optimal(v) => v,
        other => panic!("transport oracle: {other:?}"),
    }
}
