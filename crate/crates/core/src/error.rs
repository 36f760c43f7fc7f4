use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by dictionary construction, solving, and data handling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("empty dictionary: no training samples given")]
    EmptyDictionary,

    #[error("unknown class label {0}")]
    InvalidClass(u32),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("unknown method '{0}' (available: jpcem, src-single, src-multiview)")]
    UnknownMethod(String),

    #[error("failed to ingest {path}: {reason}")]
    Ingestion { path: PathBuf, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
