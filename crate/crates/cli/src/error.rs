use std::path::{Path, PathBuf};

use graphel_core::{MetricError, RecordError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Record(#[from] RecordError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config {}: {message}", path.display())]
    Config { path: PathBuf, message: String },
    #[error("unknown doc_id {0:?}")]
    UnknownDocId(String),
    #[error("doc_id {0:?} appears more than once")]
    DuplicateDocId(String),
    #[error("no document has two or more annotators")]
    NoPairs,
    #[error(transparent)]
    Metric(#[from] MetricError),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
