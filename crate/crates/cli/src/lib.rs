//! Library surface of the tracecone CLI, kept separate from the binary so
//! integration tests can exercise instance parsing, report generation,
//! synthesis, and the fuzz suites without spawning a process.

pub mod commands;
pub mod fuzz;
pub mod instance;
pub mod report;
pub mod synth;

use tracecone::ConeError;

/// Process exit codes, the whole contract: 0 pass, 1 internal error,
/// 2 invalid input, 3 unbounded or order-exceeded, 4 property failure.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_UNBOUNDED: i32 = 3;
pub const EXIT_PROPERTY_FAILURE: i32 = 4;

/// A command failure carrying the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub exit_code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            exit_code: EXIT_INVALID_INPUT,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            exit_code: EXIT_INTERNAL,
            message: message.into(),
        }
    }

    pub fn unbounded(message: impl Into<String>) -> Self {
        CliError {
            exit_code: EXIT_UNBOUNDED,
            message: message.into(),
        }
    }

    pub fn property(message: impl Into<String>) -> Self {
        CliError {
            exit_code: EXIT_PROPERTY_FAILURE,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<ConeError> for CliError {
    fn from(err: ConeError) -> Self {
        match &err {
            ConeError::OrderExceeded { norm_growth, .. } => {
                if *norm_growth {
                    CliError::unbounded(format!("norm growth detected: {err}"))
                } else {
                    CliError::unbounded(format!("group order cap exceeded: {err}"))
                }
            }
            ConeError::BudgetExceeded { .. } => CliError::unbounded(err.to_string()),
            ConeError::NoConvergence { .. } => CliError::property(err.to_string()),
            _ => CliError::input(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::internal(format!("i/o error: {err}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
