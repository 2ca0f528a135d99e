use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its documented range.
    #[error("invalid configuration `{key}`: {reason}")]
    Config { key: String, reason: String },

    /// A mathematical function was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Non-finite values appeared while evaluating the right-hand side.
    #[error("solution overflowed (non-finite samples) at t = {t}")]
    Overflow { t: f64 },

    /// The implicit stage equations could not be solved.
    #[error(
        "implicit stage iteration failed to converge at t = {t}: \
         {iterations} iterations, last update {update:e} (tolerance {tolerance:e})"
    )]
    StageIteration {
        t: f64,
        iterations: usize,
        update: f64,
        tolerance: f64,
    },

    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },
}

impl Error {
    pub(crate) fn config(key: &str, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.to_string(),
            reason: reason.into(),
        }
    }
}
