use crate::lp::LpError;
use crate::theory::TheoryErrors;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Theory(#[from] TheoryErrors),
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension { context: String, expected: usize, found: usize },
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("theory mismatch: `{left}` vs `{right}`")]
    TheoryMismatch { left: String, right: String },
    #[error("fixed object mismatch: {0}")]
    FixedMismatch(String),
    #[error("missing data: {0}")]
    MissingData(String),
    #[error(
        "enumeration guard exceeded: {count} candidate transformations > guard {guard} \
         (raise the guard or pass --force)"
    )]
    GuardExceeded { count: String, guard: u64 },
    #[error("search guard exceeded: more than {0} search nodes")]
    SearchLimit(u64),
    #[error("mass mismatch: {left} vs {right}")]
    MassMismatch { left: f64, right: f64 },
    #[error("unsupported order: {0}")]
    UnsupportedOrder(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("relaxation inequality violated: d_W = {wasserstein} > d_H = {hausdorff}")]
    RelaxationViolated { wasserstein: String, hausdorff: String },
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error("json: {0}")]
    Json(String),
}

pub(crate) fn check_dim(context: &str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { context: context.to_string(), expected, found })
    }
}
