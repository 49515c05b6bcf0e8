use std::fmt;
use std::path::Path;

/// A failure together with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

pub const INVALID: i32 = 2;
pub const IO: i32 = 3;
pub const NOT_CONVERGED: i32 = 4;
pub const SOLVER: i32 = 5;
pub const LENGTH_MISMATCH: i32 = 6;

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::new(INVALID, message)
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Self::new(IO, format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<robuststl::Error> for CliError {
    fn from(err: robuststl::Error) -> Self {
        match err {
            robuststl::Error::SolverDidNotConverge { .. } => Self::new(SOLVER, err.to_string()),
            robuststl::Error::LengthMismatch { .. } => Self::new(LENGTH_MISMATCH, err.to_string()),
            _ => Self::invalid(err.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
