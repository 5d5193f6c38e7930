use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the toolkit.
///
/// Solver outcomes such as infeasibility are reported through status enums on
/// the solution types; this type covers malformed input and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("polyhedron is unbounded")]
    Unbounded,

    #[error("weights do not match: {0} vs {1}")]
    WeightMismatch(f64, f64),

    #[error("linear program is malformed: {0}")]
    MalformedLp(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write output: {0}")]
    Output(String),

    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
