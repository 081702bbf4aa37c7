use std::path::PathBuf;

/// Errors surfaced by the library and the command-line front end.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Caller violated a documented precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// Experiment configuration rejected.
    #[error("config error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("file not found: {}", .0.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", "))]
    MissingFiles(Vec<PathBuf>),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// An internal invariant was broken (invalid tour, solver beat the optimum, ...).
    #[error("invariant violation: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    /// Process exit code: 1 usage/config, 2 I/O or parse, 3 internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config(_) => 1,
            Error::Parse { .. }
            | Error::MissingFiles(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_) => 2,
            Error::Invariant(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
