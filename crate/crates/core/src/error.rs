use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A computation would exceed a configured size cap or retry budget.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("inconsistent weight: {0}")]
    InconsistentWeight(String),

    #[error("weight is not integral at denominator {denominator}: {detail}")]
    NonIntegerDenominator { denominator: usize, detail: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("value {value} outside attainable range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("distribution is not normalized (total mass {0})")]
    NotNormalized(f64),

    /// An internal self-check failed; indicates a bug or a violated hypothesis.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
