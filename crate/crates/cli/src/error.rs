use std::fmt;

use rabi_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable, malformed or invalid configuration.
    Config(String),
    /// A power-law fit could not be carried out.
    Fit(String),
    /// The quantum steady-state pipeline failed.
    Quantum(CoreError),
    Core(CoreError),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Fit(_) => 3,
            CliError::Quantum(_) => 4,
            CliError::Core(e) => match e {
                CoreError::InvalidParams(_) | CoreError::InvalidArgument(_) => 2,
                CoreError::FitDegenerate(_) => 3,
                CoreError::DegenerateSteadyState { .. }
                | CoreError::TruncationUnsafe { .. }
                | CoreError::NotPositive { .. }
                | CoreError::Lapack { .. } => 4,
                _ => 1,
            },
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Fit(m) => write!(f, "fit error: {m}"),
            CliError::Quantum(e) => write!(f, "quantum solver failed: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
