use thiserror::Error;

/// Failures shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index out of bounds: {0}")]
    Bounds(String),
    #[error("malformed structure: {0}")]
    Structural(String),
    #[error("value lookup failed: {0}")]
    Lookup(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("argument outside its domain: {0}")]
    Domain(String),
    #[error("wrong function-class kind: {0}")]
    Kind(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
