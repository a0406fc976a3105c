use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("total dimension {requested} exceeds the capacity limit {limit}")]
    Capacity { requested: usize, limit: usize },

    #[error("operator is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("truncation at cutoff {cutoff} leaves tail mass {tail:e} (budget {budget:e})")]
    Truncation { cutoff: usize, tail: f64, budget: f64 },

    #[error("unsupported memory model: r0 = {r0}, r1 = {r1} (quantum outputs need r0 = 0, r1 = 1)")]
    UnsupportedModel { r0: f64, r1: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
