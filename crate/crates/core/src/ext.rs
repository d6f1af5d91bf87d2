//! Extended nonnegative reals `[0, ∞]` and exponents `p ∈ [1, ∞]`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use crate::scalar::Real;

/// A value in `[0, ∞]`.
///
/// Arithmetic follows measure-theoretic conventions: `x + ∞ = ∞` and
/// `0 · ∞ = 0`. The derived ordering places every finite value below `Inf`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum ExtReal<T> {
    Finite(T),
    Inf,
}

impl<T: Real> ExtReal<T> {
    pub fn zero() -> Self {
        ExtReal::Finite(T::zero())
    }

    /// Maps `+∞` to [`ExtReal::Inf`]; NaN and negative inputs are rejected.
    pub fn new(v: T) -> Option<Self> {
        if v.is_nan() || v < T::zero() {
            None
        } else if v.is_infinite() {
            Some(ExtReal::Inf)
        } else {
            Some(ExtReal::Finite(v))
        }
    }

    /// Like [`ExtReal::new`] but snaps round-off negatives (down to `-tol`) to zero.
    pub fn from_rounded(v: T, tol: T) -> Option<Self> {
        if v < T::zero() && v >= -tol {
            Some(Self::zero())
        } else {
            Self::new(v)
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, ExtReal::Inf)
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Inf => None,
        }
    }

    /// The value as a float, with `Inf` mapped to `T::infinity()`.
    pub fn to_float(&self) -> T {
        match *self {
            ExtReal::Finite(v) => v,
            ExtReal::Inf => T::infinity(),
        }
    }

    pub fn powf(self, p: T) -> Self {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v.powf(p)),
            ExtReal::Inf => ExtReal::Inf,
        }
    }

    /// `self^(1/p)`.
    pub fn root(self, p: T) -> Self {
        self.powf(T::one() / p)
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Scales by a finite nonnegative factor, with `0 · ∞ = 0`.
    pub fn scale(self, factor: T) -> Self {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v * factor),
            ExtReal::Inf if factor.is_zero() => Self::zero(),
            ExtReal::Inf => ExtReal::Inf,
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => (*a - *b).abs() <= tol,
            (ExtReal::Inf, ExtReal::Inf) => true,
            _ => false,
        }
    }

    /// `self <= other + tol`, with `∞ <= ∞`.
    pub fn approx_le(&self, other: &Self, tol: T) -> bool {
        match (self, other) {
            (_, ExtReal::Inf) => true,
            (ExtReal::Inf, ExtReal::Finite(_)) => false,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => *a <= *b + tol,
        }
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl<T: Real> Add for ExtReal<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::Inf,
        }
    }
}

impl<T: Real> Mul for ExtReal<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a * b),
            (ExtReal::Finite(a), ExtReal::Inf) | (ExtReal::Inf, ExtReal::Finite(a)) => {
                ExtReal::Inf.scale(a)
            }
            (ExtReal::Inf, ExtReal::Inf) => ExtReal::Inf,
        }
    }
}

impl<T: Real> From<T> for ExtReal<T> {
    fn from(v: T) -> Self {
        ExtReal::new(v).expect("nonnegative, non-NaN value")
    }
}

impl<T: fmt::Display> fmt::Display for ExtReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => v.fmt(f),
            ExtReal::Inf => f.write_str("inf"),
        }
    }
}

/// Exponent `p ∈ [1, ∞]` of an `L^p`, `ℓ^p` or Wasserstein metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order<T> {
    Finite(T),
    Infinity,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid order {0:?}: expected a number >= 1 or \"inf\"")]
pub struct OrderError(pub String);

impl<T: Real> Order<T> {
    pub fn new(p: T) -> Result<Self, OrderError> {
        if p.is_infinite() && p > T::zero() {
            Ok(Order::Infinity)
        } else if p >= T::one() {
            Ok(Order::Finite(p))
        } else {
            Err(OrderError(format!("{p}")))
        }
    }

    pub fn one() -> Self {
        Order::Finite(T::one())
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            Order::Finite(p) => Some(p),
            Order::Infinity => None,
        }
    }

    /// `ℓ^p` aggregate `(Σ w^p)^(1/p)`, or `max w` for `p = ∞`.
    pub fn aggregate<I: IntoIterator<Item = ExtReal<T>>>(&self, weights: I) -> ExtReal<T> {
        match *self {
            Order::Infinity => weights.into_iter().fold(ExtReal::zero(), ExtReal::max),
            Order::Finite(p) => weights
                .into_iter()
                .fold(ExtReal::zero(), |acc, w| acc + w.powf(p))
                .root(p),
        }
    }
}

impl<T: Real> FromStr for Order<T> {
    type Err = OrderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(Order::Infinity);
        }
        let v: f64 = s.parse().map_err(|_| OrderError(s.to_string()))?;
        Order::new(T::from_f64(v)).map_err(|_| OrderError(s.to_string()))
    }
}

impl<T: fmt::Display> fmt::Display for Order<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(p) => p.fmt(f),
            Order::Infinity => f.write_str("inf"),
        }
    }
}
