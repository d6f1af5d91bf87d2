//! Finite Markov kernels as row-stochastic matrices.
//!
//! Product spaces are indexed row-major throughout the crate: the pair `(y, z)`
//! of `Y × Z` is the index `y * |Z| + z`. Kernels into a product (couplings)
//! and out of a product (products of kernels) use the same layout, which is
//! also the layout of coupling variables in the linear programs built by
//! [`crate::relax`].

use crate::error::{check_dim, Error, Result};
use crate::mm::MeasureData;
use crate::scalar::Real;

/// Markov kernel `rows -> cols`; row `x` is the distribution `M(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteKernel<T> {
    rows: usize,
    cols: usize,
    p: Vec<T>,
}

impl<T: Real> FiniteKernel<T> {
    /// Validates nonnegativity and unit row sums (within the comparison
    /// tolerance). Rows are never silently renormalized.
    pub fn new(rows: usize, cols: usize, p: Vec<T>) -> Result<Self> {
        check_dim("kernel entries", rows * cols, p.len())?;
        let k = FiniteKernel { rows, cols, p };
        for x in 0..rows {
            let row = k.row(x);
            if let Some(bad) = row.iter().find(|v| !(**v >= T::zero()) || v.is_infinite()) {
                return Err(Error::InvalidKernel(format!("entry {bad} in row {x} is not a probability")));
            }
            let s = row.iter().fold(T::zero(), |a, b| a + *b);
            if (s - T::one()).abs() > T::cmp_tol() {
                return Err(Error::InvalidKernel(format!("row {x} sums to {s}, not 1")));
            }
        }
        Ok(k)
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<T>>) -> Result<Self> {
        for r in &rows {
            check_dim("kernel row", cols, r.len())?;
        }
        FiniteKernel::new(rows.len(), cols, rows.into_iter().flatten().collect())
    }

    /// Accepts raw solver output: clamps round-off negatives and rescales rows
    /// whose sums are off by at most `tol`. Larger deviations are an error.
    pub fn from_approximate(rows: usize, cols: usize, mut p: Vec<T>, tol: T) -> Result<Self> {
        check_dim("kernel entries", rows * cols, p.len())?;
        for x in 0..rows {
            let row = &mut p[x * cols..(x + 1) * cols];
            for v in row.iter_mut() {
                if *v < -tol {
                    return Err(Error::InvalidKernel(format!("entry {v} in row {x} is negative")));
                }
                if *v < T::zero() {
                    *v = T::zero();
                }
            }
            let s = row.iter().fold(T::zero(), |a, b| a + *b);
            if (s - T::one()).abs() > tol || s <= T::zero() {
                return Err(Error::InvalidKernel(format!("row {x} sums to {s}, not 1")));
            }
            for v in row.iter_mut() {
                *v = *v / s;
            }
        }
        Ok(FiniteKernel { rows, cols, p })
    }

    pub fn identity(n: usize) -> Self {
        embed_function(&(0..n).collect::<Vec<_>>(), n).expect("identity is in range")
    }

    pub fn uniform(rows: usize, cols: usize) -> Self {
        assert!(cols > 0 || rows == 0, "no kernel from a nonempty set into the empty set");
        let v = T::one() / T::from_usize(cols.max(1));
        FiniteKernel { rows, cols, p: vec![v; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> T {
        self.p[x * self.cols + y]
    }

    pub fn row(&self, x: usize) -> &[T] {
        &self.p[x * self.cols..(x + 1) * self.cols]
    }

    pub fn entries(&self) -> &[T] {
        &self.p
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|x| self.row(x).to_vec()).collect()
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.p.iter().zip(&other.p).all(|(a, b)| (*a - *b).abs() <= tol)
    }

    /// Every row is a Dirac mass.
    pub fn is_deterministic(&self) -> bool {
        let tol = T::cmp_tol();
        (0..self.rows).all(|x| {
            let row = self.row(x);
            row.iter().filter(|v| (**v - T::one()).abs() <= tol).count() == 1
                && row.iter().filter(|v| v.abs() > tol).count() == 1
        })
    }

    /// For a deterministic kernel, the function it embeds.
    pub fn as_function(&self) -> Option<Vec<usize>> {
        if !self.is_deterministic() {
            return None;
        }
        Some((0..self.rows).map(|x| self.row(x).iter().position(|v| *v > T::from_f64(0.5)).unwrap()).collect())
    }

    /// The row vector `μ M`.
    pub fn apply_measure(&self, mu: &MeasureData<T>) -> Result<MeasureData<T>> {
        check_dim("measure action", self.rows, mu.len())?;
        let mut w = vec![T::zero(); self.cols];
        for x in 0..self.rows {
            let m = mu.get(x);
            if m.is_zero() {
                continue;
            }
            for (y, v) in self.row(x).iter().enumerate() {
                w[y] = w[y] + m * *v;
            }
        }
        MeasureData::new(w)
    }
}

/// Kernel composition `M · N` (first `M`, then `N`).
pub fn compose_kernels<T: Real>(m: &FiniteKernel<T>, n: &FiniteKernel<T>) -> Result<FiniteKernel<T>> {
    check_dim("kernel composition", m.cols, n.rows)?;
    let mut p = vec![T::zero(); m.rows * n.cols];
    for x in 0..m.rows {
        let out = &mut p[x * n.cols..(x + 1) * n.cols];
        for (y, a) in m.row(x).iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (o, b) in out.iter_mut().zip(n.row(y)) {
                *o = *o + *a * *b;
            }
        }
    }
    Ok(FiniteKernel { rows: m.rows, cols: n.cols, p })
}

/// Deterministic kernel `x ↦ δ_{f(x)}`.
pub fn embed_function<T: Real>(f: &[usize], cod: usize) -> Result<FiniteKernel<T>> {
    let mut p = vec![T::zero(); f.len() * cod];
    for (x, &y) in f.iter().enumerate() {
        if y >= cod {
            return Err(Error::Dimension { context: "embedded function codomain".into(), expected: cod, found: y + 1 });
        }
        p[x * cod + y] = T::one();
    }
    Ok(FiniteKernel { rows: f.len(), cols: cod, p })
}

/// `μ M`.
pub fn apply_measure<T: Real>(mu: &MeasureData<T>, m: &FiniteKernel<T>) -> Result<MeasureData<T>> {
    m.apply_measure(mu)
}

/// A nonnegative finite measure on `X × Y`, stored as an `n_X × n_Y` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct JointMeasure<T> {
    nx: usize,
    ny: usize,
    m: Vec<T>,
}

impl<T: Real> JointMeasure<T> {
    pub fn new(nx: usize, ny: usize, m: Vec<T>) -> Result<Self> {
        check_dim("joint measure entries", nx * ny, m.len())?;
        if let Some(bad) = m.iter().find(|v| !(**v >= T::zero()) || v.is_infinite()) {
            return Err(Error::InvalidMeasure(format!("joint mass {bad} is not a nonnegative finite number")));
        }
        Ok(JointMeasure { nx, ny, m })
    }

    pub fn from_rows(ny: usize, rows: Vec<Vec<T>>) -> Result<Self> {
        for r in &rows {
            check_dim("joint measure row", ny, r.len())?;
        }
        JointMeasure::new(rows.len(), ny, rows.into_iter().flatten().collect())
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn get(&self, x: usize, y: usize) -> T {
        self.m[x * self.ny + y]
    }

    pub fn entries(&self) -> &[T] {
        &self.m
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.m.chunks(self.ny.max(1)).take(self.nx).map(|r| r.to_vec()).collect()
    }

    /// Marginal along `X` (row sums).
    pub fn first_marginal(&self) -> Vec<T> {
        (0..self.nx).map(|x| (0..self.ny).fold(T::zero(), |a, y| a + self.get(x, y))).collect()
    }

    /// Marginal along `Y` (column sums).
    pub fn second_marginal(&self) -> Vec<T> {
        (0..self.ny).map(|y| (0..self.nx).fold(T::zero(), |a, x| a + self.get(x, y))).collect()
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.shape() == other.shape() && self.m.iter().zip(&other.m).all(|(a, b)| (*a - *b).abs() <= tol)
    }
}

/// `(μ ⊗ M)(x, y) = μ(x) M(y | x)`.
pub fn product_measure<T: Real>(mu: &MeasureData<T>, m: &FiniteKernel<T>) -> Result<JointMeasure<T>> {
    check_dim("product measure", m.rows, mu.len())?;
    let p = (0..m.rows).flat_map(|x| m.row(x).iter().map(move |v| mu.get(x) * *v)).collect();
    JointMeasure::new(m.rows, m.cols, p)
}

/// Splits `π` into its first marginal `μ` and a kernel `M` with `π = μ ⊗ M`.
/// Rows of zero mass get the uniform distribution.
pub fn disintegrate<T: Real>(pi: &JointMeasure<T>) -> Result<(MeasureData<T>, FiniteKernel<T>)> {
    let mu = pi.first_marginal();
    if pi.ny == 0 && pi.nx > 0 {
        return Err(Error::InvalidKernel("cannot disintegrate onto an empty second factor".into()));
    }
    let uniform = T::one() / T::from_usize(pi.ny.max(1));
    let mut p = Vec::with_capacity(pi.nx * pi.ny);
    for (x, &mass) in mu.iter().enumerate() {
        for y in 0..pi.ny {
            p.push(if mass > T::zero() { pi.get(x, y) / mass } else { uniform });
        }
    }
    Ok((MeasureData::new(mu)?, FiniteKernel { rows: pi.nx, cols: pi.ny, p }))
}

/// Whether `pi: X -> Y × Z` has marginals `m` along `Y` and `n` along `Z`.
pub fn is_coupling<T: Real>(pi: &FiniteKernel<T>, m: &FiniteKernel<T>, n: &FiniteKernel<T>) -> Result<bool> {
    check_dim("coupling rows", m.rows, n.rows)?;
    check_dim("coupling rows", m.rows, pi.rows)?;
    check_dim("coupling columns", m.cols * n.cols, pi.cols)?;
    let tol = T::cmp_tol();
    let (ny, nz) = (m.cols, n.cols);
    for x in 0..pi.rows {
        let row = pi.row(x);
        for y in 0..ny {
            let s = (0..nz).fold(T::zero(), |a, z| a + row[y * nz + z]);
            if (s - m.get(x, y)).abs() > tol {
                return Ok(false);
            }
        }
        for z in 0..nz {
            let s = (0..ny).fold(T::zero(), |a, y| a + row[y * nz + z]);
            if (s - n.get(x, z)).abs() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether `pi: W × X -> Y × Z` is a product of `m: W -> Y` and `n: X -> Z`.
pub fn is_product<T: Real>(pi: &FiniteKernel<T>, m: &FiniteKernel<T>, n: &FiniteKernel<T>) -> Result<bool> {
    check_dim("product rows", m.rows * n.rows, pi.rows)?;
    check_dim("product columns", m.cols * n.cols, pi.cols)?;
    let tol = T::cmp_tol();
    let (nx, ny, nz) = (n.rows, m.cols, n.cols);
    for w in 0..m.rows {
        for x in 0..nx {
            let row = pi.row(w * nx + x);
            for y in 0..ny {
                let s = (0..nz).fold(T::zero(), |a, z| a + row[y * nz + z]);
                if (s - m.get(w, y)).abs() > tol {
                    return Ok(false);
                }
            }
            for z in 0..nz {
                let s = (0..ny).fold(T::zero(), |a, y| a + row[y * nz + z]);
                if (s - n.get(x, z)).abs() > tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Rowwise independent coupling `x ↦ M(x) ⊗ N(x)`.
pub fn independent_coupling<T: Real>(m: &FiniteKernel<T>, n: &FiniteKernel<T>) -> Result<FiniteKernel<T>> {
    check_dim("coupling rows", m.rows, n.rows)?;
    let p = (0..m.rows)
        .flat_map(|x| {
            let (a, b) = (m.row(x), n.row(x));
            a.iter().flat_map(move |u| b.iter().map(move |v| *u * *v))
        })
        .collect();
    Ok(FiniteKernel { rows: m.rows, cols: m.cols * n.cols, p })
}

/// Independent product `(w, x) ↦ M(w) ⊗ N(x)`.
pub fn independent_product<T: Real>(m: &FiniteKernel<T>, n: &FiniteKernel<T>) -> FiniteKernel<T> {
    let mut p = Vec::with_capacity(m.rows * n.rows * m.cols * n.cols);
    for w in 0..m.rows {
        for x in 0..n.rows {
            for u in m.row(w) {
                for v in n.row(x) {
                    p.push(*u * *v);
                }
            }
        }
    }
    FiniteKernel { rows: m.rows * n.rows, cols: m.cols * n.cols, p }
}

/// The deterministic coupling `M · Δ_Y` of `M` with itself.
pub fn diagonal_coupling<T: Real>(m: &FiniteKernel<T>) -> FiniteKernel<T> {
    let ny = m.cols;
    let mut p = vec![T::zero(); m.rows * ny * ny];
    for x in 0..m.rows {
        for y in 0..ny {
            p[x * ny * ny + y * ny + y] = m.get(x, y);
        }
    }
    FiniteKernel { rows: m.rows, cols: ny * ny, p }
}

/// One kernel per object of the theory.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovTransformation<T> {
    pub components: Vec<FiniteKernel<T>>,
}

impl<T: Real> MarkovTransformation<T> {
    /// Whether every component is deterministic.
    pub fn is_deterministic(&self) -> bool {
        self.components.iter().all(FiniteKernel::is_deterministic)
    }
}
