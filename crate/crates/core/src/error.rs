use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("state corruption: {0}")]
    StateCorruption(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
