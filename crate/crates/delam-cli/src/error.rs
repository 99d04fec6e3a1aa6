use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error("{0}: {1}")]
    Csv(PathBuf, String),
    #[error("model: {0}")]
    Model(#[from] delam::Error),
    #[error("solver stopped: {0}")]
    NoConvergence(String),
    #[error("comparison: {0}")]
    Compare(String),
}

impl CliError {
    /// 2 for solver non-convergence, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::NoConvergence(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
