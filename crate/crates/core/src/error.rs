use thiserror::Error;

/// Errors raised by the exact and floating-point layers of the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not a quantile function: {0}")]
    NotQuantile(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("malformed index set: {0}")]
    MalformedSubset(String),

    #[error("enumeration of {candidates} candidates exceeds the cap of {cap}")]
    SizeCap { candidates: u128, cap: u128 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("shift regime violated: {0}")]
    ShiftRegime(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("internal invariant failed: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
