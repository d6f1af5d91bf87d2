//! Scalar abstractions.
//!
//! [`Field`] is what the simplex solver needs: ordered field arithmetic plus the
//! tolerances used for pivoting and feasibility. It is implemented for `f32`,
//! `f64` and exact [`BigRational`], for which every tolerance is zero.
//!
//! [`Real`] adds floating-point operations (powers, roots, infinity) and is what
//! the metric, kernel and transport code is written against.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, Num, Signed, ToPrimitive, Zero};

pub trait Field: Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync {
    /// Smallest magnitude accepted as a pivot element.
    fn pivot_tol() -> Self;
    /// Absolute tolerance for primal feasibility and reduced-cost optimality.
    fn feas_tol() -> Self;
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;

    fn from_usize(v: usize) -> Self {
        Self::from_f64(v as f64)
    }

    /// `true` when the field is exact, in which case tolerances are zero and
    /// solver results are exact.
    fn is_exact() -> bool {
        false
    }
}

pub trait Real: Field + Float {
    /// Tolerance for comparisons of distances, masses and row sums.
    fn cmp_tol() -> Self;
}

impl Field for f64 {
    fn pivot_tol() -> Self {
        1e-10
    }
    fn feas_tol() -> Self {
        1e-7
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Real for f64 {
    fn cmp_tol() -> Self {
        1e-9
    }
}

// f32 has ~7 significant digits, so the f64 defaults would be below its epsilon.
impl Field for f32 {
    fn pivot_tol() -> Self {
        1e-6
    }
    fn feas_tol() -> Self {
        1e-4
    }
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

impl Real for f32 {
    fn cmp_tol() -> Self {
        1e-5
    }
}

impl Field for BigRational {
    fn pivot_tol() -> Self {
        BigRational::zero()
    }
    fn feas_tol() -> Self {
        BigRational::zero()
    }
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite f64")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_usize(v: usize) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_exact() -> bool {
        true
    }
}

/// `|a - b| <= tol`.
pub fn approx_eq<T: Field>(a: &T, b: &T, tol: &T) -> bool {
    (a.clone() - b.clone()).abs() <= *tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        let r = BigRational::from_f64(0.375);
        assert_eq!(Field::to_f64(&r), 0.375);
        assert!(BigRational::is_exact());
        assert!(BigRational::feas_tol().is_zero());
    }

    #[test]
    fn float_tolerances_are_ordered() {
        assert!(f64::pivot_tol() < f64::feas_tol());
        assert!(f32::pivot_tol() < f32::feas_tol());
        assert!(f64::cmp_tol() < f64::feas_tol());
    }
}
