use std::io;

use thiserror::Error;

/// Errors raised across the crate.
///
/// The variants are grouped by the exit code the command-line front end maps
/// them to: data problems, numeric problems, and configuration problems.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("format error on line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("label error: {0}")]
    Label(String),

    #[error("size error: requested {requested} points but only {available} are available")]
    Size { requested: usize, available: usize },

    #[error("sample error: cannot draw {requested} distinct points from {available}")]
    Sample { requested: usize, available: usize },

    #[error("provenance mismatch: {0}")]
    Provenance(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("degenerate kernel: no eigenvalue above {floor:e}")]
    DegenerateKernel { floor: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("persisted file error: {0}")]
    Persist(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by bad numerics rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Numeric(_) | Error::DegenerateKernel { .. } | Error::Contract(_)
        )
    }

    /// True for errors caused by the caller's configuration or flags.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Parameter(_))
    }
}
