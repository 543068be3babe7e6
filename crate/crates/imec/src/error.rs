use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex not in graph: {0}")]
    UnknownVertex(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("endpoint conditioned")]
    EndpointConditioned,
    #[error("graph too large for exhaustive model ({0} vertices, bound {1})")]
    TooLarge(usize, usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
