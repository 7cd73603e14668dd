use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("length mismatch: header declares {expected} payload bytes, found {actual}")]
    LengthMismatch { expected: u64, actual: u64 },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("trial {trial_id}: alignment error: {detail}")]
    Alignment { trial_id: String, detail: String },

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("trial {trial_id}: missing {role} file {path}")]
    MissingFile {
        trial_id: String,
        role: String,
        path: PathBuf,
    },

    #[error("trial {trial_id}: missing feature '{feature}'")]
    MissingFeature { trial_id: String, feature: String },

    #[error("unsupported rate: {0}")]
    UnsupportedRate(String),

    #[error("input too short: {0}")]
    TooShort(String),

    #[error("lag-grid error: {0}")]
    LagGrid(String),

    #[error("singular system: {0}; use a regularization lambda > 0")]
    Singular(String),

    #[error("degenerate test: {0}")]
    DegenerateTest(String),

    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("fold {fold}: {source}")]
    Fold {
        fold: String,
        #[source]
        source: Box<Error>,
    },

    #[error("JSON error in {context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_fold(self, fold: &str) -> Self {
        Error::Fold {
            fold: fold.to_string(),
            source: Box::new(self),
        }
    }
}
