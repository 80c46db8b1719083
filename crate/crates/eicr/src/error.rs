use thiserror::Error;

/// Errors surfaced by dataset handling, model evaluation, and training.
#[derive(Debug, Error)]
pub enum EicrError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{path}:{line}: {message}")]
    MalformedRow {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("non-finite loss at iteration {iteration}")]
    NonFiniteLoss { iteration: u64 },

    #[error("scene {0} present in ground truth but absent in predictions")]
    MissingScene(u64),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl EicrError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        EicrError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, EicrError>;
