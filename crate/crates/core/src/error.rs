use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed molecule file. `line` is 1-based within the record.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("no standard valence for element {symbol} (Z={atomic_number}); supply implicit_h explicitly")]
    UnknownValence { atomic_number: u8, symbol: &'static str },

    #[error("instance has {size} variables, exceeding the solver cap of {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("{count} candidate tuples exceed the cap of {cap}; use a stricter layout")]
    TupleCap { count: usize, cap: usize },

    #[error("penalty construction needs more than {cap} monomials")]
    MonomialCap { cap: usize },

    #[error("polynomial has degree {0}, expected at most 2")]
    Degree(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("only {available} scoreable neighbours, need {needed}")]
    Abstain { available: usize, needed: usize },

    #[error("{0}")]
    Data(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::File { path: path.into(), source: Box::new(self) }
    }
}
