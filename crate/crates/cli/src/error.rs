use thiserror::Error;

/// Failure of a command, carrying its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed command line. Exit code 1.
    #[error("{0}")]
    Usage(String),
    /// Bad input file, flag value or unwritable output. Exit code 2.
    #[error("{0}")]
    Input(String),
    /// A broken internal invariant. Exit code 3.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<batchrec::Error> for CliError {
    fn from(e: batchrec::Error) -> Self {
        match e {
            batchrec::Error::Usage(msg) => CliError::Internal(msg),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
