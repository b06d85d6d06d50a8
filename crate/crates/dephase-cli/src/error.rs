//! Error type carrying the process exit code contract: 1 usage, 2 failed
//! comparison, 3 numerical failure.

use std::fmt;

use dephase_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    ComparisonFailed(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    pub fn from_core(err: CoreError) -> Self {
        match err {
            CoreError::Numerical(msg) => Self::Numerical(msg.to_string()),
            other => Self::Usage(other.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Io(_) => 1,
            Self::ComparisonFailed(_) => 2,
            Self::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(msg) => write!(f, "error: {msg}"),
            Self::ComparisonFailed(msg) => write!(f, "comparison failed: {msg}"),
            Self::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            Self::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        Self::Io(err.to_string())
    }
}
