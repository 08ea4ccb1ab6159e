use thiserror::Error;

/// Errors surfaced by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("strategy enumeration refused: {n_x} inputs exceed the cap of {cap}")]
    EnumerationCap { n_x: usize, cap: usize },

    #[error("strategy {index}: {source}")]
    Strategy {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn numerical(msg: impl Into<String>) -> Error {
    Error::NumericalFailure(msg.into())
}
