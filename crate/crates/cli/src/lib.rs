//! Command-line front end: `discretize`, `sweep`, `bench` and `soundness`.

pub mod args;
pub mod commands;
pub mod exec;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use lti_reach::models::ModelError;

use args::{Cli, Command};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_SOUNDNESS: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] lti_reach::Error),
    #[error("{0}")]
    Usage(String),
    #[error("soundness violation: {0}")]
    Soundness(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(lti_reach::Error::Model(
                ModelError::Io { .. } | ModelError::Parse { .. } | ModelError::Sidecar { .. },
            )) => EXIT_IO,
            CliError::Core(_) | CliError::Usage(_) => EXIT_PRECONDITION,
            CliError::Soundness(_) => EXIT_SOUNDNESS,
            CliError::Io { .. } | CliError::Output(_) => EXIT_IO,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }
    }
}

/// Parses `args` (program name first), runs the command writing its report
/// to `out`, and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PRECONDITION } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Discretize(a) => commands::discretize(a, out),
        Command::Sweep(a) => commands::sweep(a, out),
        Command::Bench(a) => commands::bench(a, out),
        Command::Soundness(a) => commands::soundness(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
