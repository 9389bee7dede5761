use std::process::ExitCode;

use cavity_casimir::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, config file, mirror file or unit choice.
    #[error("{0}")]
    Config(String),
    /// A computation failed or its cross-checks disagree.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Numerical(_) => ExitCode::from(3),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidInput(_)
            | CoreError::Parse { .. }
            | CoreError::Io { .. }
            | CoreError::RealAxisTable
            | CoreError::Window(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("output: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    /// Prefix numerical failures with the point they happened at.
    pub fn with_context(self, at: &str) -> Self {
        match self {
            CliError::Numerical(m) => CliError::Numerical(format!("{at}: {m}")),
            other => other,
        }
    }
}
