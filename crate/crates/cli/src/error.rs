use std::path::PathBuf;

use kaon_core::KaonError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}:{line}: {message}", path.display())]
    Config {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Physics(#[from] KaonError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed invariants: {}", .0.join(", "))]
    CheckFailed(Vec<String>),
}

impl CliError {
    /// 1 for failed checks, 2 for everything the user has to fix.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) => 1,
            _ => 2,
        }
    }
}
