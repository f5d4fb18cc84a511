//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by model construction, circuit execution, and analysis.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates an operation precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A size guard tripped (dense matrices, register widths).
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// An internal consistency check failed; indicates a bug, not bad input.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// The requested evolution time aliases the eigenphase past the
    /// decodable window.
    #[error("phase wrap: {0}")]
    PhaseWrap(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::ResourceLimit(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::InvariantViolation(msg.into())
    }
}
