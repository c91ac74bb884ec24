use std::io;

use thiserror::Error;

/// Errors produced by the coverage solvers and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// An allocation handed to a rate evaluation breaks its own invariants.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// A user has zero effective gain, so no finite power can serve it.
    #[error("degenerate channel gain for the {0} user")]
    DegenerateGain(&'static str),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: impl AsRef<std::path::Path>, source: io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
