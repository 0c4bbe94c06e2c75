use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Inputs violate a type invariant (negative variance, zero-weight atom, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Parameters lie outside the region where the requested quantity exists.
    #[error("domain error: {0}")]
    Domain(String),

    /// A floating point intermediate would leave the representable range.
    #[error("range error: {0}")]
    Range(String),

    /// The requested tolerance could not be met; `best` is the last estimate.
    #[error("accuracy not reached: best estimate {best:e} with error {error:e} ({reason})")]
    Accuracy { best: f64, error: f64, reason: String },

    /// Exact enumeration or evaluation budget exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// A numerical kernel (factorization, eigen-decomposition) failed.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
