use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("matrix dimension {0} is not even")]
    OddDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parameter `{name}` = {value} out of range: {constraint}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("invalid covariance matrix: minimum symplectic eigenvalue {0} < 1")]
    InvalidCovariance(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("distribution support is not connected (zero entry at index {0} below a positive entry)")]
    DisconnectedSupport(usize),

    #[error("threshold case mu*kappa = 1 has no asymptotic spectrum")]
    ThresholdCase,

    #[error("map (K, alpha) does not send Gaussian states to Gaussian states: {0}")]
    InvalidMap(String),

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(name: &'static str, value: f64, constraint: &'static str) -> Error {
    Error::OutOfRange {
        name,
        value,
        constraint,
    }
}
