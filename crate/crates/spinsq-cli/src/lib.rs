//! Library side of the command-line front end: file formats and command
//! implementations, shared with the integration and acceptance tests.

pub mod commands;
pub mod formats;

/// CLI failure modes mapped onto exit codes: argument problems exit 2,
/// numeric or capacity problems exit 3.
#[derive(Debug)]
pub enum CliError {
    Arg(String),
    Io(std::io::Error),
    Parse(serde_json::Error),
    Core(spinsq_core::Error),
}

impl From<spinsq_core::Error> for CliError {
    fn from(e: spinsq_core::Error) -> CliError {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Arg(_) | CliError::Io(_) | CliError::Parse(_) => 2,
            CliError::Core(e) => commands::core_exit_code(e),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Arg(msg) => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Parse(e) => write!(f, "{e}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}
