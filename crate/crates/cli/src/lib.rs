//! Command-line front end: map documents in, CSV or JSON reports out.
//!
//! Exit codes: 0 pass/equal, 1 not-equal or failed check, 2 input or
//! evaluation error, 3 a verification suite was skipped because its
//! precondition does not hold.

pub mod args;
pub mod commands;
pub mod document;
pub mod grid_spec;
pub mod output;

pub use args::{Cli, Command};
pub use commands::run;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("evaluation error: {0}")]
    Eval(#[from] hschwarz::Error),
    #[error("evaluation error at {z}: {source}")]
    EvalAt { z: num_complex::Complex64, source: hschwarz::Error },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_EQUAL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_SKIPPED: i32 = 3;

/// Text to print and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub text: String,
    pub exit_code: i32,
}
