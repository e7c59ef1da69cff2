//! CLI error taxonomy and exit-code mapping.

/// Errors the experiment runner reports, each with its own exit code:
/// validation failures exit 2, resource-cap failures 3, I/O failures 4.
#[derive(Debug, Clone)]
pub enum CliError {
    Validation(String),
    Resource(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Resource(m) => write!(f, "resource error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<dmbm_core::Error> for CliError {
    fn from(e: dmbm_core::Error) -> Self {
        match e {
            dmbm_core::Error::Config(m) | dmbm_core::Error::Contract(m) => CliError::Validation(m),
            dmbm_core::Error::Resource(m) => CliError::Resource(m),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
