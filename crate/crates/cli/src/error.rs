//! Error types shared by the file formats and the command layer.

use thiserror::Error;

/// Errors from parsing telemetry logs or scenario files.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("scenario key `{key}`: {msg}")]
    Key { key: String, msg: String },
    #[error("no frames")]
    NoFrames,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl FormatError {
    pub fn line(line: usize, msg: impl Into<String>) -> Self {
        Self::Line {
            line,
            msg: msg.into(),
        }
    }

    pub fn key(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Self::Key {
            key: key.into(),
            msg: msg.into(),
        }
    }
}

/// Command-layer error, carrying the process exit code policy:
/// 2 for input errors, 3 for data insufficiency, 1 for anything else.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Insufficient(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 2,
            Self::Insufficient(_) => 3,
            Self::Internal(_) => 1,
        }
    }

    pub fn input(e: impl std::fmt::Display) -> Self {
        Self::Input(e.to_string())
    }

    pub fn insufficient(e: impl std::fmt::Display) -> Self {
        Self::Insufficient(e.to_string())
    }

    pub fn internal(e: impl std::fmt::Display) -> Self {
        Self::Internal(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Internal(e.to_string())
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Io(io) => Self::Internal(io.to_string()),
            other => Self::Input(other.to_string()),
        }
    }
}
