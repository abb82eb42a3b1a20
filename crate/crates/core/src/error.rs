use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("unsupported archive version {0}")]
    Version(u32),

    #[error("truncated input: {0}")]
    Truncated(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("similarity undefined: {0}")]
    UndefinedSimilarity(String),

    #[error("incomplete probe set: {0}")]
    IncompleteSet(String),

    #[error("lookup error: {0}")]
    Lookup(String),

    #[error("degenerate grouping: {0}")]
    DegenerateGrouping(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("language error: {0}")]
    Language(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("comparison error: {0}")]
    Comparison(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
}
