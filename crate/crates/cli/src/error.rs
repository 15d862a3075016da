use std::fmt;
use std::process::ExitCode;

/// Everything that can stop a command, with its exit status.
#[derive(Debug)]
pub enum CliError {
    Core(prelog_core::Error),
    /// Bad file contents or inconsistent options.
    Input(String),
    /// Failure writing results.
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Core(e) if e.is_input_error() => ExitCode::from(2),
            CliError::Core(_) => ExitCode::from(4),
            CliError::Input(_) => ExitCode::from(2),
            CliError::Output(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(m) | CliError::Output(m) => f.write_str(m),
        }
    }
}

impl From<prelog_core::Error> for CliError {
    fn from(e: prelog_core::Error) -> Self {
        CliError::Core(e)
    }
}
