use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("corpus is not valid UTF-8: {0}")]
    Encoding(#[from] std::str::Utf8Error),

    #[error("invalid category descriptor `{label}`: {message}")]
    Descriptor { label: String, message: String },

    #[error("invalid example: {0}")]
    InvalidExample(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("training failed: {message}")]
    Training {
        message: String,
        /// Best dual objective reached before giving up, when the failure
        /// comes from the SVM solver hitting its iteration cap.
        best_dual: Option<f64>,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn training(message: impl Into<String>) -> Self {
        Error::Training {
            message: message.into(),
            best_dual: None,
        }
    }
}
