use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("invalid ring descriptor: {0}")]
    InvalidRing(String),
    #[error("parity mismatch: {0}")]
    Parity(String),
    #[error("element is not invertible: {0}")]
    NotInvertible(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not a homological field: {0}")]
    NotHomological(String),
    #[error("witness check failed: {0}")]
    Witness(String),
    #[error("gluing check failed: {0}")]
    Gluing(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("undecided at bound {bound}: {what}")]
    Undecided { bound: usize, what: String },
    #[error("inconsistent facts: {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
}
