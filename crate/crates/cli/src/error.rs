use thiserror::Error;

/// Front-end errors, split by the exit code they map to.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),

    #[error("numerical: {0}")]
    Numerical(String),
}

impl CliError {
    /// 1 for configuration errors, 2 for I/O, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<tvdehaze::Error> for CliError {
    fn from(err: tvdehaze::Error) -> Self {
        match &err {
            tvdehaze::Error::Config(_) | tvdehaze::Error::AtmosphericTooLow { .. } => {
                CliError::Config(err.to_string())
            }
            _ => CliError::Numerical(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}
