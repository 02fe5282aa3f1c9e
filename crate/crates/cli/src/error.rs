use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, malformed files, or parameters the library rejects.
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    /// An oracle or gradient comparison exceeded its tolerance.
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0} acceptance check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Verification(_) => 3,
        })
    }
}

impl From<contattn::Error> for CliError {
    fn from(e: contattn::Error) -> Self {
        match e {
            contattn::Error::ToleranceNotReached(_) => CliError::Verification(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(format!("malformed JSON: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
