//! Loading and output plumbing for the screenbot command line tool.

pub mod intents;
pub mod output;
pub mod scenario_io;

use thiserror::Error;

/// CLI failure classes mapped onto exit codes: configuration and usage
/// problems exit 1, runtime failures exit 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    ConfigIo {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: {source}")]
    Scenario {
        path: String,
        source: screenbot_core::scenario::ScenarioError,
    },
    #[error("{path}: {source}")]
    Intents {
        path: String,
        source: screenbot_core::chat::ChatError,
    },
    #[error("{context}: {source}")]
    OutputIo {
        context: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigIo { .. }
            | CliError::Parse { .. }
            | CliError::Scenario { .. }
            | CliError::Intents { .. }
            | CliError::Usage(_) => 1,
            CliError::OutputIo { .. } | CliError::Runtime(_) => 2,
        }
    }
}
