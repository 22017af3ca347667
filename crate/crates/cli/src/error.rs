use thiserror::Error;

/// Top-level failure classes, mapped one-to-one onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Exit code 1.
    #[error("invalid config: {0}")]
    Config(String),
    /// Exit code 2.
    #[error("{0}")]
    Runtime(String),
    /// Exit code 3.
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<gjcm::Error> for CliError {
    fn from(e: gjcm::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
