use thiserror::Error;

/// Errors raised across the toolkit.
///
/// `Budget` and `Precision` are kept apart from ordinary input errors because
/// the command line maps them to a dedicated exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("ambient mismatch: {0}")]
    Ambient(String),
    #[error("containment violated: {0}")]
    Containment(String),
    #[error("ring or algebra mismatch: {0}")]
    RingMismatch(String),
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("search budget exceeded: {0}")]
    Budget(String),
    #[error("precision instability: {0}")]
    Precision(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("lift failure: {0}")]
    Lift(String),
}

pub type Result<T> = std::result::Result<T, Error>;
