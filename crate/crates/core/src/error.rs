use thiserror::Error;

/// Errors raised by the algebra engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("divergent integral: {0}")]
    Divergence(String),
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("singular: {0}")]
    Singular(String),
    #[error("unsupported class: {0}")]
    Class(String),
    #[error("unsupported action: {0}")]
    UnsupportedAction(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
