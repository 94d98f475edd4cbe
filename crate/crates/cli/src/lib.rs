//! Command-line front end for `fkk-core`: configuration, study orchestration
//! and table output.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver failure,
//! 4 precondition violation.

pub mod config;
pub mod format;
pub mod runner;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use config::{parse_text, render, validate, Cli, Command, ConfigError, OutputFormat, RunConfig};
pub use runner::{execute, CliError, Report};

/// Parse, validate and execute; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run_parsed(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("fkk: {e}");
            e.exit_code()
        }
    }
}

fn run_parsed(cli: Cli) -> Result<(), CliError> {
    let config = cli.into_config()?;
    validate(&config).map_err(CliError::Precondition)?;
    let report = execute(&config)?;
    for note in &report.notes {
        eprintln!("{note}");
    }
    match &config.output {
        Some(path) => std::fs::write(path, &report.body)?,
        None => std::io::stdout().write_all(report.body.as_bytes())?,
    }
    Ok(())
}
