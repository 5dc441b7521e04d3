use std::io;

use thiserror::Error;

/// Errors returned by construction, queries and (de)serialization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("position {index} out of range (valid: {min}..={max})")]
    OutOfRange { index: u64, min: u64, max: u64 },
    #[error("occurrence {ordinal} of {what} not found (only {available} present)")]
    NotFound { what: String, ordinal: u64, available: u64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("corrupt data: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn corrupt(msg: impl Into<String>) -> Self {
        Error::Corrupt(msg.into())
    }

    pub(crate) fn range(index: u64, min: u64, max: u64) -> Self {
        Error::OutOfRange { index, min, max }
    }
}
