//! CLI-level errors and their mapping to process exit codes.
//!
//! Exit codes: 0 success, 1 query answered false, 2 bad input (syntax,
//! unknown names, invalid parameters, I/O), 3 the grounded-default cap was
//! exceeded.

use std::fmt;

use nmr_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    /// A syntax error in a `.dt` document or formula argument, with a
    /// 1-based position.
    Parse { line: usize, column: usize, message: String },
    /// A well-formed input that asks for something impossible.
    Input(String),
    /// An error surfaced by the reasoning engines.
    Core(CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::DefaultCapExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse { line, column, message } => {
                write!(f, "line {line}, column {column}: {message}")
            }
            CliError::Input(message) => f.write_str(message),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
