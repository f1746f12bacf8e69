use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid valuation: {0}")]
    InvalidValuation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("protocol failure at agent {agent}: {reason}")]
    ProtocolFailure { agent: usize, reason: String },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("internal error: {0}")]
    Internal(String),
}
