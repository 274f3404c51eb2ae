use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model definition is inconsistent (boundary conditions, mass, ...).
    #[error("invalid model: {0}")]
    Model(String),

    /// A computation produced a non-finite value.
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    /// A data file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
