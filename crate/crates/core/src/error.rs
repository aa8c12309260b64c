use thiserror::Error;

/// Errors raised by the solvers and I/O routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (dimensions, weights, parameters).
    #[error("invalid input: {0}")]
    Input(String),

    /// The operation is not defined for the given classifier kind or shape.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A randomized generator ran out of attempts.
    #[error("generation failed: {0}")]
    Generation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
