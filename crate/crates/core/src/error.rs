//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by parsing, validation, and numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a documented precondition or type invariant.
    #[error("{0}")]
    InvalidInput(String),

    /// Malformed source data; `location` names the offending file/line/record.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// An iterative numerical procedure failed to converge or left its
    /// valid region.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The annotation endpoint misbehaved beyond what retries could absorb.
    #[error("annotator: {0}")]
    Annotator(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }

    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Error::Numerical(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
