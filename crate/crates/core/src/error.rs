use thiserror::Error;

/// Errors raised by the computational core.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// The nuisance interval is empty after intersection with the admissible range.
    #[error("empty nuisance set for theta = {theta}")]
    EmptyNuisanceSet { theta: f64 },

    /// Two curves that must share a grid do not.
    #[error("membership curves are sampled on different grids")]
    GridMismatch,

    /// Exhaustive enumeration refused because the sample space is too large.
    #[error("sample space has {outcomes} outcomes, above the guard of {limit}; pass the override to run anyway")]
    SizeGuard { outcomes: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
