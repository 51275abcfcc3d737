//! Batch front end for the `gaussent` library: parameter scans, spectrum
//! reports, time evolution and conformal fits with deterministic CSV/JSON
//! output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod config;
pub mod error;
pub mod grid;
pub mod output;
pub mod scan;
pub mod state_file;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use args::{Cli, Command};
pub use error::{CliError, Result};
pub use output::{Cell, FitRecord, ScanResult};
pub use scan::execute;

/// Outcome of parsing a command line.
pub enum Parsed {
    Run(Box<Command>),
    /// `--help` or `--version`: print and exit successfully.
    Info(String),
}

/// Expands `--config` and parses the arguments. Clap errors become usage
/// errors (exit code 4).
pub fn parse<I, T>(argv: I) -> Result<Parsed>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv = config::expand_config(argv.into_iter().map(Into::into).collect())?;
    match Cli::try_parse_from(argv) {
        Ok(cli) => Ok(Parsed::Run(Box::new(cli.command))),
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp
            | clap::error::ErrorKind::DisplayVersion
            | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => Ok(Parsed::Info(e.to_string())),
            _ => Err(CliError::Spec(e.to_string().trim_end().to_string())),
        },
    }
}

/// Writes the result to `--out` or standard output in the chosen format.
pub fn emit(cmd: &Command, result: &ScanResult) -> Result<()> {
    let args = cmd.args();
    let mut buf = Vec::new();
    match args.format {
        args::Format::Csv => output::write_csv(result, args.precision, &mut buf),
        args::Format::Json => output::write_json(result, args.precision, &mut buf),
    }
    .expect("writing to memory cannot fail");
    match &args.out {
        Some(path) => std::fs::write(path, &buf).map_err(|e| CliError::io(path.display(), e)),
        None => std::io::stdout()
            .write_all(&buf)
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

/// Parses, runs and emits; returns the process exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let started = std::time::Instant::now();
    let outcome = parse(argv).and_then(|parsed| match parsed {
        Parsed::Info(text) => {
            print!("{text}");
            Ok(None)
        }
        Parsed::Run(cmd) => {
            let result = execute(&cmd)?;
            emit(&cmd, &result)?;
            Ok(Some((cmd.name(), result.rows.len())))
        }
    });
    match outcome {
        Ok(Some((name, rows))) => {
            eprintln!(
                "gaussent: {name}: {rows} rows in {:.3} s",
                started.elapsed().as_secs_f64()
            );
            0
        }
        Ok(None) => 0,
        Err(e) => {
            eprintln!("gaussent: error: {e}");
            e.exit_code()
        }
    }
}
