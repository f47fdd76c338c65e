use std::path::PathBuf;

use crate::ctl::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{context}: expected length {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("ill-posed regression: {pairs} training pairs for {unknowns} unknowns with ridge_lambda = {lambda}")]
    IllPosedRegression {
        pairs: usize,
        unknowns: usize,
        lambda: f64,
    },

    #[error("entropy is undefined for an all-zero count vector")]
    UndefinedEntropy,

    #[error("cannot partition: {0}")]
    CannotPartition(String),

    #[error("formula references unknown atom p{0}")]
    UnknownAtom(usize),

    #[error(transparent)]
    Syntax(#[from] ParseError),

    #[error("malformed JSON at `{pointer}`: {message}")]
    Json { pointer: String, message: String },

    #[error("trace CSV format error at line {line}: {message}")]
    Format { line: u64, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn dims(context: &'static str, expected: usize, actual: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            actual,
        }
    }
}

/// Deserializes JSON while tracking the path to the first offending field,
/// reported as a JSON pointer (`/layers/0/activation`).
pub(crate) fn from_json_str<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let mut pointer = String::new();
        for segment in err.path().iter() {
            use serde_path_to_error::Segment;
            match segment {
                Segment::Seq { index } => pointer.push_str(&format!("/{index}")),
                Segment::Map { key } => pointer.push_str(&format!("/{key}")),
                Segment::Enum { variant } => pointer.push_str(&format!("/{variant}")),
                Segment::Unknown => pointer.push_str("/?"),
            }
        }
        if pointer.is_empty() {
            pointer.push('/');
        }
        Error::Json {
            pointer,
            message: err.into_inner().to_string(),
        }
    })
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_file(path: &std::path::Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}
