use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NsbmError {
    #[error("label {label} out of range for truncation {bound}")]
    LabelOutOfRange { label: usize, bound: usize },

    #[error("node {node} out of range for network with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, NsbmError>;
