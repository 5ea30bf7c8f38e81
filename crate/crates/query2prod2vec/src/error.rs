//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A line in a JSON-lines file failed to parse. Line numbers are 1-based.
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate product id {0:?}")]
    DuplicateProduct(String),

    #[error("unknown key {0:?}")]
    UnknownKey(String),

    #[error("unknown field {0:?}")]
    UnknownField(String),

    #[error("catalog is empty")]
    EmptyCatalog,

    #[error("vocabulary is empty after min_count filtering")]
    EmptyVocabulary,

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid embedding key {0:?} (keys must be non-empty and whitespace-free)")]
    InvalidKey(String),

    #[error("dimension mismatch for key {key:?}: expected {expected}, got {got}")]
    DimensionMismatch {
        key: String,
        expected: usize,
        got: usize,
    },

    #[error("non-finite component in vector for key {0:?}")]
    NonFiniteVector(String),

    #[error("query {0:?} has no clicked product with an embedding")]
    QueryNotEmbeddable(String),

    #[error("no query could be embedded (product space and click log are disjoint)")]
    NoEmbeddableQueries,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(
        path: impl Into<PathBuf>,
        line: usize,
        message: impl Into<String>,
    ) -> Self {
        Error::Malformed {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
