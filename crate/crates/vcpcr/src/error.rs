//! Shared error type for all fitting, data and harness operations.

use thiserror::Error;

/// Errors raised by data handling, solvers and model fits.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("column {0} is constant; standardization is undefined")]
    ConstantColumn(usize),

    #[error("input contains a non-finite value")]
    NonFinite,

    #[error("vector is constant; correlation is undefined")]
    ConstantVector,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("response column '{0}' not found in header")]
    MissingColumn(String),

    #[error("could not parse cell at row {row}, column {col}: '{value}'")]
    ParseError { row: usize, col: usize, value: String },

    #[error("file has no data rows")]
    EmptyFile,

    #[error("solver hit the iteration limit ({0}) before converging")]
    MaxIterations(usize),

    #[error("linear system is singular")]
    SingularSystem,

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("initial cluster {0} has no members")]
    EmptyCluster(usize),

    #[error("label {label} is outside the declared range 1..={k}")]
    InvalidLabel { label: usize, k: usize },

    #[error("latent variable for cluster {0} is degenerate (zero spread)")]
    DegenerateLatent(usize),

    #[error("all variables were removed; lambda is too large for this data")]
    AllVariablesRemoved,

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("response must contain both classes for classification")]
    SingleClassResponse,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
