use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical kernels and the constructions built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An evaluation did not reach its tolerance within the configured budget.
    #[error(
        "accuracy error: {message} (best estimate {best:?}, error estimate {error_estimate:e})"
    )]
    Accuracy {
        message: String,
        best: Complex64,
        error_estimate: f64,
    },

    /// Repeated Vandermonde nodes.
    #[error("singular system: {0}")]
    Singular(String),

    #[error("arithmetic error: {0}")]
    Arithmetic(String),

    /// An index is excluded, or lies outside the computed window.
    #[error("index error: {0}")]
    Index(String),

    /// The requested computation needs the trigonometric realization.
    #[error("unsupported realization: {0}")]
    Unsupported(String),

    /// Eigen-solver or fit failure.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Malformed input (grids, windows, configuration).
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
