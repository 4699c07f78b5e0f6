//! Command-line front end: argument parsing, input files and report output.
//!
//! Every subcommand renders its whole report in memory before writing it,
//! so a failing run never leaves a partial output file behind.

pub mod commands;
pub mod config;
pub mod io;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use thiserror::Error;

pub use config::Cli;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Model(String),
    #[error("{failed} of {total} checks did not pass")]
    ValidationFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Model(_) => 3,
            CliError::ValidationFailed { .. } => 4,
        }
    }
}

impl From<dipstr_core::Error> for CliError {
    fn from(e: dipstr_core::Error) -> Self {
        if e.is_model_error() {
            CliError::Model(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return e.exit_code();
        }
    };
    match commands::execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
