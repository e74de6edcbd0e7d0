use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("endomorphism is not injective")]
    NotInjective,
    #[error("endomorphism is not expansive")]
    NotExpansive,
    #[error("digit index {0} out of range")]
    InvalidDigit(usize),
    #[error("subgroup is not invariant under the endomorphism")]
    NotInvariant,
    #[error("{0} is not in the image of the endomorphism")]
    NotInImage(String),
    #[error("{what} exceeded cap {cap}")]
    CapExceeded { what: String, cap: usize },
    #[error("search inconclusive: {0}")]
    Inconclusive(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("alphabet mismatch")]
    AlphabetMismatch,
    #[error("F^{0} - 1 is singular (eigenvalue one)")]
    EigenvalueOne(u32),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn cap(what: impl Into<String>, cap: usize) -> Self {
        Error::CapExceeded {
            what: what.into(),
            cap,
        }
    }
}
