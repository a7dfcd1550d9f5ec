//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide error. The variants map onto the CLI exit codes: parameter
/// and file problems exit 1, resource guards exit 2, numeric anomalies
/// exit 3.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value is outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A configured resource limit (dimension, message count) would be
    /// exceeded. These fail loudly instead of thrashing.
    #[error("guard violation: {0}")]
    GuardViolation(String),

    /// Numerical failure: eigensolver non-convergence, a sampled
    /// probability-zero branch, a matrix that is not PSD within tolerance.
    #[error("numeric anomaly: {0}")]
    NumericAnomaly(String),

    /// Malformed code file.
    #[error("code file: {0}")]
    CodeFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn guard(msg: impl Into<String>) -> Self {
        Error::GuardViolation(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::NumericAnomaly(msg.into())
    }
}
