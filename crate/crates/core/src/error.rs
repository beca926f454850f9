use thiserror::Error;

/// Errors raised by construction, enumeration and evaluation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("base {0} is outside the supported range 2..2^16")]
    BaseOutOfRange(u64),

    #[error("base mismatch: {left} vs {right}")]
    BaseMismatch { left: u32, right: u32 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A hypothesis of the construction theorem does not hold (strict mode only).
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),

    #[error("index {index} out of range (must be < {bound})")]
    OutOfRange { index: String, bound: String },

    /// A size guard refused to start an enumeration or evaluation.
    #[error("size guard exceeded: {what} needs {required}, limit is {limit}")]
    GuardExceeded {
        what: String,
        required: String,
        limit: String,
    },

    #[error("self-check failed: {0}")]
    SelfCheck(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn guard(what: impl Into<String>, required: impl ToString, limit: impl ToString) -> Self {
        Error::GuardExceeded {
            what: what.into(),
            required: required.to_string(),
            limit: limit.to_string(),
        }
    }

    /// True for errors produced by size guards rather than by invalid input.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::GuardExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
