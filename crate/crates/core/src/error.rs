//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical or numerical parameter is outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative/discretized solver did not reach the requested accuracy.
    #[error("solver resolution: {0}")]
    Resolution(String),

    /// A requested object would exceed a configured capacity limit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Arrays or operators with incompatible dimensions were combined.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The phase convention could not be fixed deterministically.
    #[error("gauge fixing failed: {0}")]
    Gauge(String),

    /// A frequency grid does not cover the spectral lines it must represent.
    #[error("grid coverage: {0}")]
    Coverage(String),

    /// The underlying dense eigensolver reported a failure.
    #[error("eigensolver failure: {0}")]
    Linalg(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn resolution(msg: impl Into<String>) -> Self {
        Error::Resolution(msg.into())
    }
}
