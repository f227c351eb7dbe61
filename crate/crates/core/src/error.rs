use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid quasi-surface: {0}")]
    Validation(String),

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("unknown generator g{token} (rank {rank})", token = .0 + 1, rank = .1)]
    UnknownGenerator(usize, usize),

    #[error("fox derivative has no image for generator g{}", .0 + 1)]
    MissingImage(usize),

    #[error("invalid diagram: {0}")]
    Diagram(String),

    #[error("gate orientation has length {found}, expected {expected}")]
    OmegaLength { expected: usize, found: usize },

    #[error("representation point: {0}")]
    Representation(String),

    #[error("arity mismatch: expected {expected}, got {found}")]
    Arity { expected: usize, found: usize },

    #[error("json: {0}")]
    Json(String),
}

impl Error {
    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(format!("line {} column {}: {}", e.line(), e.column(), e))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
