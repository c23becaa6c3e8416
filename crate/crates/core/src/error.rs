use thiserror::Error;

/// Errors raised by simulation and verification routines.
#[derive(Debug, Error)]
pub enum IdtError {
    /// A parameter lies outside its mathematical domain.
    #[error("parameter domain error: {0}")]
    Domain(String),
    /// An input violates a structural contract (shape, symmetry, monotonicity).
    #[error("contract violation: {0}")]
    Contract(String),
    /// A numerical routine failed (e.g. factorization after maximal jitter).
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, IdtError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(IdtError::Domain(msg.into()))
}

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(IdtError::Contract(msg.into()))
}
