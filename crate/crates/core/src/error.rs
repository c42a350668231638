use std::path::PathBuf;

/// Errors shared by every module in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("input too large: {0}")]
    Size(String),

    #[error("label {label} out of range for {class_count} classes")]
    LabelOutOfRange { label: usize, class_count: usize },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("{path}:{row}: {message}")]
    Parse {
        path: PathBuf,
        /// 1-based line number in the source file.
        row: usize,
        message: String,
    },

    #[error("unmapped label {value:?} at data row {row}")]
    UnmappedLabel { value: String, row: usize },

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_fold(self, fold: usize) -> Error {
        Error::Fold {
            fold,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
