use thiserror::Error;

use crate::snapshot::SnapshotError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("budget cap exceeded: {0}")]
    Budget(String),
    #[error(transparent)]
    Core(#[from] monopole_core::Error),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("output error: {0}")]
    Output(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    /// Process exit status: 2 for configuration problems, 4 for budget caps,
    /// 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use monopole_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Budget(_) | CliError::Core(E::Budget(_)) => 4,
            CliError::Core(E::InvalidArgument(_) | E::InvalidGrid(_)) => 2,
            _ => 1,
        }
    }

    /// Message without the variant prefix.
    pub fn message(&self) -> String {
        match self {
            CliError::Config(m) | CliError::Budget(m) | CliError::Output(m) | CliError::Verification(m) => m.clone(),
            other => other.to_string(),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
