//! Lawvere metrics and finite measures on the carriers of an instance.
//!
//! Metrics take values in `[0, ∞]`, need not be symmetric, and may vanish off
//! the diagonal. Only the identity law and the triangle inequality are
//! required, and both are checked when a metric is constructed.

use crate::cset::Instance;
use crate::error::{check_dim, Error, Result};
use crate::ext::{ExtReal, Order};
use crate::markov::FiniteKernel;
use crate::scalar::Real;

/// An `n × n` distance matrix over `0..n`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricData<T> {
    n: usize,
    d: Vec<ExtReal<T>>,
}

impl<T: Real> MetricData<T> {
    /// Builds and certifies a metric (zero diagonal, triangle inequality).
    pub fn new(n: usize, d: Vec<ExtReal<T>>) -> Result<Self> {
        check_dim("metric entries", n * n, d.len())?;
        let m = MetricData { n, d };
        m.validate()?;
        Ok(m)
    }

    pub fn from_rows(rows: Vec<Vec<ExtReal<T>>>) -> Result<Self> {
        let n = rows.len();
        for row in &rows {
            check_dim("metric row", n, row.len())?;
        }
        MetricData::new(n, rows.into_iter().flatten().collect())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let tol = T::cmp_tol();
        for i in 0..n {
            if !self.get(i, i).approx_eq(&ExtReal::zero(), tol) {
                return Err(Error::InvalidMetric(format!("d({i},{i}) = {} is not 0", self.get(i, i))));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let dij = self.get(i, j);
                if dij.is_inf() {
                    continue;
                }
                for k in 0..n {
                    let via = dij + self.get(j, k);
                    if !self.get(i, k).approx_le(&via, tol) {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails: d({i},{k}) = {} > d({i},{j}) + d({j},{k}) = {via}",
                            self.get(i, k)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> ExtReal<T> {
        self.d[i * self.n + j]
    }

    pub fn entries(&self) -> &[ExtReal<T>] {
        &self.d
    }

    pub fn rows(&self) -> impl Iterator<Item = &[ExtReal<T>]> {
        self.d.chunks(self.n.max(1)).take(self.n)
    }

    /// `∞` everywhere off the diagonal.
    pub fn is_discrete(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).is_inf()))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j).approx_eq(&self.get(j, i), T::cmp_tol())))
    }

    /// Entrywise `d^p`, the cost vector of a transport problem, row-major.
    pub fn powf(&self, p: T) -> Vec<ExtReal<T>> {
        self.d.iter().map(|v| v.powf(p)).collect()
    }
}

/// 0 on the diagonal, `∞` elsewhere.
pub fn discrete_metric<T: Real>(n: usize) -> MetricData<T> {
    let d = (0..n * n)
        .map(|k| if k / n == k % n { ExtReal::zero() } else { ExtReal::Inf })
        .collect();
    MetricData { n, d }
}

/// All-pairs shortest directed path lengths on `n` vertices, by edge count or by
/// total weight when `weights` is given. Unreachable pairs are at distance `∞`.
pub fn shortest_path_from_edges<T: Real>(
    n: usize,
    edges: &[(usize, usize)],
    weights: Option<&[T]>,
) -> Result<MetricData<T>> {
    if let Some(w) = weights {
        check_dim("edge weights", edges.len(), w.len())?;
        if let Some(bad) = w.iter().find(|w| !(**w >= T::zero()) || w.is_infinite()) {
            return Err(Error::InvalidMetric(format!("edge weight {bad} is not a nonnegative finite number")));
        }
    }
    let mut m = discrete_metric::<T>(n);
    for (e, &(s, t)) in edges.iter().enumerate() {
        if s >= n || t >= n {
            return Err(Error::InvalidMetric(format!("edge {e} endpoint out of range")));
        }
        let w = ExtReal::Finite(weights.map_or(T::one(), |w| w[e]));
        if s != t {
            let cell = &mut m.d[s * n + t];
            *cell = cell.min(w);
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = m.d[i * n + k];
            if dik.is_inf() {
                continue;
            }
            for j in 0..n {
                let via = dik + m.d[k * n + j];
                if via < m.d[i * n + j] {
                    m.d[i * n + j] = via;
                }
            }
        }
    }
    Ok(m)
}

/// Shortest-path metric on the vertices of a graph-like instance: one with
/// generators `src` and `tgt` sharing a domain (edges) and codomain (vertices).
pub fn shortest_path_metric<T: Real>(x: &Instance<T>, weights: Option<&[T]>) -> Result<MetricData<T>> {
    let th = x.theory();
    let (src, tgt) = match (th.generator("src"), th.generator("tgt")) {
        (Some(s), Some(t)) if th.dom(s) == th.dom(t) && th.cod(s) == th.cod(t) => (s, t),
        _ => {
            return Err(Error::InvalidMetric(format!(
                "shortest-path metric needs parallel generators src, tgt in theory {}",
                th.name()
            )))
        }
    };
    let edges: Vec<_> = x.map(src).iter().copied().zip(x.map(tgt).iter().copied()).collect();
    shortest_path_from_edges(x.card(th.cod(src)), &edges, weights)
}

/// Nonnegative finite weights on `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureData<T> {
    w: Vec<T>,
}

impl<T: Real> MeasureData<T> {
    pub fn new(w: Vec<T>) -> Result<Self> {
        if let Some(bad) = w.iter().find(|v| !(**v >= T::zero()) || v.is_infinite()) {
            return Err(Error::InvalidMeasure(format!("weight {bad} is not a nonnegative finite number")));
        }
        Ok(MeasureData { w })
    }

    pub fn counting(n: usize) -> Self {
        MeasureData { w: vec![T::one(); n] }
    }

    /// Total mass one, spread evenly.
    pub fn uniform(n: usize) -> Self {
        let each = T::one() / T::from_usize(n.max(1));
        MeasureData { w: vec![each; n] }
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        let mut w = vec![T::zero(); n];
        w[at] = T::one();
        MeasureData { w }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn weights(&self) -> &[T] {
        &self.w
    }

    pub fn get(&self, i: usize) -> T {
        self.w[i]
    }

    pub fn total(&self) -> T {
        self.w.iter().fold(T::zero(), |a, b| a + *b)
    }

    /// Pushforward `μ f` along a function into `0..cod`.
    pub fn pushforward(&self, f: &[usize], cod: usize) -> Result<Self> {
        check_dim("pushforward domain", self.len(), f.len())?;
        let mut w = vec![T::zero(); cod];
        for (x, &y) in f.iter().enumerate() {
            if y >= cod {
                return Err(Error::Dimension { context: "pushforward codomain".into(), expected: cod, found: y + 1 });
            }
            w[y] = w[y] + self.w[x];
        }
        Ok(MeasureData { w })
    }

    /// Entrywise `self <= other` within the comparison tolerance.
    pub fn dominated_by(&self, other: &Self) -> Result<bool> {
        check_dim("measure comparison", other.len(), self.len())?;
        Ok(self.w.iter().zip(&other.w).all(|(a, b)| *a <= *b + T::cmp_tol()))
    }
}

/// `d_Y(f x, f x') <= d_X(x, x')` for every pair.
pub fn is_short_map<T: Real>(f: &[usize], dx: &MetricData<T>, dy: &MetricData<T>) -> Result<bool> {
    check_dim("short map domain", dx.len(), f.len())?;
    if let Some(&y) = f.iter().find(|&&y| y >= dy.len()) {
        return Err(Error::Dimension { context: "short map codomain".into(), expected: dy.len(), found: y + 1 });
    }
    let tol = T::cmp_tol();
    Ok((0..f.len()).all(|i| (0..f.len()).all(|j| dy.get(f[i], f[j]).approx_le(&dx.get(i, j), tol))))
}

/// `μ_X M <= μ_Y` entrywise.
pub fn is_measure_decreasing<T: Real>(
    k: &FiniteKernel<T>,
    mu_x: &MeasureData<T>,
    mu_y: &MeasureData<T>,
) -> Result<bool> {
    k.apply_measure(mu_x)?.dominated_by(mu_y)
}

/// `μ_X f <= μ_Y` entrywise; with counting measures this is injectivity.
pub fn is_measure_decreasing_map<T: Real>(
    f: &[usize],
    mu_x: &MeasureData<T>,
    mu_y: &MeasureData<T>,
) -> Result<bool> {
    mu_x.pushforward(f, mu_y.len())?.dominated_by(mu_y)
}

/// `L^p` distance between `f, g: X -> Y`. For `p = ∞` this is the supremum of
/// `d_Y(f x, g x)` over the support of `μ_X`.
pub fn lp_distance<T: Real>(
    f: &[usize],
    g: &[usize],
    mu_x: &MeasureData<T>,
    dy: &MetricData<T>,
    p: Order<T>,
) -> Result<ExtReal<T>> {
    check_dim("L^p distance", mu_x.len(), f.len())?;
    check_dim("L^p distance", mu_x.len(), g.len())?;
    check_codomain(f, g, dy)?;
    Ok(match p {
        Order::Finite(p) => f
            .iter()
            .zip(g)
            .enumerate()
            .fold(ExtReal::zero(), |acc, (x, (&a, &b))| acc + dy.get(a, b).powf(p).scale(mu_x.get(x)))
            .root(p),
        Order::Infinity => f
            .iter()
            .zip(g)
            .enumerate()
            .filter(|(x, _)| mu_x.get(*x) > T::zero())
            .fold(ExtReal::zero(), |acc, (_, (&a, &b))| acc.max(dy.get(a, b))),
    })
}

/// Supremum distance `max_x d_Y(f x, g x)`, ignoring any measure.
pub fn sup_distance<T: Real>(f: &[usize], g: &[usize], dy: &MetricData<T>) -> Result<ExtReal<T>> {
    check_dim("sup distance", f.len(), g.len())?;
    check_codomain(f, g, dy)?;
    Ok(f.iter().zip(g).fold(ExtReal::zero(), |acc, (&a, &b)| acc.max(dy.get(a, b))))
}

fn check_codomain<T: Real>(f: &[usize], g: &[usize], dy: &MetricData<T>) -> Result<()> {
    match f.iter().chain(g).find(|&&y| y >= dy.len()) {
        Some(&y) => Err(Error::Dimension { context: "function codomain".into(), expected: dy.len(), found: y + 1 }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type E = ExtReal<f64>;

    fn line(n: usize) -> MetricData<f64> {
        let d = (0..n * n).map(|k| E::Finite((k / n).abs_diff(k % n) as f64)).collect();
        MetricData::new(n, d).unwrap()
    }

    fn cycle(n: usize) -> Vec<(usize, usize)> {
        (0..n).map(|i| (i, (i + 1) % n)).collect()
    }

    #[test]
    fn discrete_metric_shapes() {
        assert!(discrete_metric::<f64>(0).is_empty());
        assert_eq!(discrete_metric::<f64>(1).entries(), [E::zero()]);
        assert_eq!(discrete_metric::<f64>(2).entries(), [E::zero(), E::Inf, E::Inf, E::zero()]);
        assert!(discrete_metric::<f64>(3).is_discrete());
    }

    #[test]
    fn cycle_shortest_paths() {
        let d = shortest_path_from_edges::<f64>(4, &cycle(4), None).unwrap();
        assert_eq!(d.get(0, 1), E::Finite(1.0));
        assert_eq!(d.get(1, 0), E::Finite(3.0));
        assert_eq!(d.get(0, 0), E::zero());
        d.validate().unwrap();
    }

    #[test]
    fn sink_vertex_is_unreachable_from() {
        let d = shortest_path_from_edges::<f64>(3, &[(1, 0), (1, 2), (2, 0)], None).unwrap();
        assert_eq!(d.get(0, 1), E::Inf);
        assert_eq!(d.get(1, 0), E::Finite(1.0));
        assert_eq!(shortest_path_from_edges::<f64>(1, &[], None).unwrap().entries(), [E::zero()]);
    }

    #[test]
    fn weighted_paths_and_negative_weights() {
        let d = shortest_path_from_edges(3, &[(0, 1), (1, 2), (0, 2)], Some(&[1.0, 1.5, 5.0])).unwrap();
        assert_eq!(d.get(0, 2), E::Finite(2.5));
        assert!(shortest_path_from_edges(2, &[(0, 1)], Some(&[-1.0])).is_err());
    }

    #[test]
    fn explicit_metric_validation() {
        let bad = MetricData::from_rows(vec![
            vec![E::zero(), E::Finite(1.0), E::Finite(5.0)],
            vec![E::Finite(1.0), E::zero(), E::Finite(1.0)],
            vec![E::Finite(5.0), E::Finite(1.0), E::zero()],
        ]);
        assert!(matches!(bad, Err(Error::InvalidMetric(_))));
        assert!(MetricData::<f64>::from_rows(vec![vec![E::Finite(1.0)]]).is_err());
        // Asymmetric and degenerate metrics are fine.
        MetricData::from_rows(vec![vec![E::zero(), E::zero()], vec![E::Inf, E::zero()]]).unwrap();
    }

    #[test]
    fn short_maps() {
        let c4 = shortest_path_from_edges::<f64>(4, &cycle(4), None).unwrap();
        assert!(is_short_map(&[0, 0, 0, 0], &c4, &c4).unwrap());
        assert!(is_short_map(&[0, 1, 2, 3], &c4, &c4).unwrap());
        assert!(!is_short_map(&[0, 2, 2, 3], &c4, &c4).unwrap());
        assert!(is_short_map(&[3, 1, 0], &discrete_metric(3), &c4).unwrap());
        assert!(is_short_map(&[0, 1], &c4, &c4).is_err());
    }

    #[test]
    fn measure_decreasing_maps() {
        let count3 = MeasureData::<f64>::counting(3);
        assert!(is_measure_decreasing_map(&[2, 0, 1], &count3, &count3).unwrap());
        assert!(!is_measure_decreasing_map(&[2, 2, 1], &count3, &count3).unwrap());
        let u = FiniteKernel::<f64>::uniform(3, 3);
        assert!(is_measure_decreasing(&u, &count3, &count3).unwrap());
    }

    #[test]
    fn lp_distances() {
        let mu = MeasureData::<f64>::counting(2);
        let d = line(3);
        assert_eq!(lp_distance(&[0, 0], &[0, 0], &mu, &d, Order::one()).unwrap(), E::zero());
        assert_eq!(lp_distance(&[0, 0], &[1, 2], &mu, &d, Order::one()).unwrap(), E::Finite(3.0));
        assert_eq!(lp_distance(&[0, 0], &[1, 2], &mu, &d, Order::Infinity).unwrap(), E::Finite(2.0));
        let half = MeasureData::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(lp_distance(&[0, 0], &[1, 2], &half, &d, Order::Infinity).unwrap(), E::Finite(1.0));
        // 0 · ∞ = 0 on a null atom.
        let disc = discrete_metric::<f64>(3);
        assert_eq!(lp_distance(&[0, 0], &[0, 2], &half, &disc, Order::one()).unwrap(), E::zero());
        assert_eq!(sup_distance(&[0, 0], &[0, 2], &disc).unwrap(), E::Inf);
    }
}
