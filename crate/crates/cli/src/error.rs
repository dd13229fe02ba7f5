use syncmdp::{GuardError, ModelError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Model { path: String, source: ModelError },
    #[error("{0}")]
    Input(String),
    #[error("guard tripped: {source}")]
    Guard {
        #[from]
        source: GuardError,
    },
    /// The verdict matrix broke an identity; this is an engine bug.
    #[error("consistency gate failed:\n  {}", .0.join("\n  "))]
    Gate(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } | CliError::Model { .. } | CliError::Input(_) => 2,
            CliError::Guard { .. } => 3,
            CliError::Gate(_) => 4,
        }
    }
}
