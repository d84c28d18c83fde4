use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Caller supplied an invalid combination of parameters.
    #[error("usage error: {0}")]
    Usage(String),
    /// An operation was applied outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("leading coefficient is not invertible: {0}")]
    NotInvertible(String),
    #[error("insufficient truncation order: {0}")]
    InsufficientOrder(String),
    /// Two computations that must agree by construction did not.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
