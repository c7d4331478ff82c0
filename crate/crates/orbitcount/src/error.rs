use std::path::PathBuf;

use thiserror::Error;

use orbitcount_core::Error as CoreError;

/// Process exit codes of the command-line tool.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CEILING: i32 = 1;
    pub const INVALID_INPUT: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("cannot write JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Parse { .. } => exit::INVALID_INPUT,
            HarnessError::Io { .. } | HarnessError::Csv(_) | HarnessError::Json(_) => exit::NUMERICAL,
            HarnessError::Core(e) => match e {
                CoreError::Numerical(_) | CoreError::Inconsistent(_) => exit::NUMERICAL,
                CoreError::Infeasible { .. } => exit::CEILING,
                _ => exit::INVALID_INPUT,
            },
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
