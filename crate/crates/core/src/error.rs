use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("capacity exceeded: {what} is {size}, limit {limit}")]
    Capacity {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("index {index} out of range (len {len})")]
    Range { index: usize, len: usize },
    #[error("config error: {0}")]
    Config(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
