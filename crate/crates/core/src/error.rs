use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} lies outside the truncation 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("enumeration of {count} functionals exceeds the cap of {cap}")]
    EnumerationCap { count: u128, cap: u128 },

    /// The truncation dimension is too small for a search to be guaranteed to succeed.
    #[error("truncation too small: {detail}; need m >= {required} (have m = {actual})")]
    TruncationTooSmall {
        required: BigUint,
        actual: usize,
        detail: String,
    },

    #[error("point set is degenerate: rank {rank} < dimension {dim}")]
    Rank { rank: usize, dim: usize },

    #[error("no refutation certificate found: {0}")]
    NoCertificate(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    /// Errors caused by the caller's parameters rather than a failed check.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Input(_)
                | Error::IndexOutOfRange { .. }
                | Error::Parse(_)
                | Error::Json(_)
                | Error::Io(_)
                | Error::TruncationTooSmall { .. }
                | Error::EnumerationCap { .. }
        )
    }
}
