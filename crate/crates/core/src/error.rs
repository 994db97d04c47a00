use thiserror::Error;

/// Errors raised by the depth, band and boxplot routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("empty band")]
    EmptyBand,

    #[error("index {index} out of range for sample of size {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("unbounded band")]
    UnboundedBand,

    #[error("median lies outside the band at grid point {0}")]
    MedianOutsideBand(usize),

    #[error("grids differ")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("covariance not PD")]
    CovarianceNotPd,
}

pub type Result<T> = std::result::Result<T, Error>;
