//! Homomorphisms, Markov relaxations and Hausdorff/Wasserstein distances
//! between finite C-sets.
//!
//! The numerical core is generic over the scalar type (`f64`, `f32`, and exact
//! `BigRational` for the LP solver). The aliases at the crate root fix the
//! scalar to `f64`.

pub mod builtins;
pub mod cset;
pub mod error;
pub mod ext;
pub mod hausdorff;
pub mod json;
pub mod lp;
pub mod markov;
pub mod mm;
pub mod relax;
pub mod scalar;
pub mod theory;
pub mod transport;

pub use cset::Transformation;
pub use error::{Error, Result};
pub use scalar::{Field, Real};
pub use theory::{BuiltinTheory, Theory};

pub type ExtReal = ext::ExtReal<f64>;
pub type Order = ext::Order<f64>;
pub type Instance = cset::Instance<f64>;
pub type MetricData = mm::MetricData<f64>;
pub type MeasureData = mm::MeasureData<f64>;
pub type FiniteKernel = markov::FiniteKernel<f64>;
pub type JointMeasure = markov::JointMeasure<f64>;
pub type MarkovTransformation = markov::MarkovTransformation<f64>;
pub type LpModel = lp::LpModel<f64>;
pub type LpSolution = lp::LpSolution<f64>;
pub type ExactLpModel = lp::LpModel<num_rational::BigRational>;
pub type HausdorffConfig = hausdorff::HausdorffConfig<f64>;
pub type HausdorffResult = hausdorff::HausdorffResult<f64>;
pub type WassersteinProgram = relax::WassersteinProgram<f64>;
pub type WassersteinResult = relax::WassersteinResult<f64>;
