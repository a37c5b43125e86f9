use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// The permutations do not describe a valid rooted map.
    #[error("structural error: {0}")]
    Structural(String),
    /// An operation was called outside its domain.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A size guard (dart cap, genus cap) was exceeded.
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
