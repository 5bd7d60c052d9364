//! Command-line front end for casimir-core.
//!
//! Exit codes: 0 success, 1 input or I/O failure, 2 usage or parameter
//! error, 3 numerical non-convergence, 4 a verification check failed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
mod commands;
mod models;
pub mod table;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use casimir_core::CasimirError;

pub use args::parse_angle;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;
pub const EXIT_CHECK: i32 = 4;

#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<CasimirError>() {
            return match e {
                CasimirError::Convergence { .. } => EXIT_CONVERGENCE,
                CasimirError::Domain(_) | CasimirError::Unsupported(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            };
        }
    }
    EXIT_FAILURE
}

/// Runs the tool with process stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the tool; data goes to `out` unless `--out` is given, messages
/// always go to `err`.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    use args::Command::*;
    let (result, dest) = match &cli.command {
        Epsilon(a) => (commands::epsilon(a), &a.common.out),
        Pressure(a) => (commands::pressure(a), &a.common.out),
        Gradient(a) => (commands::gradient(a), &a.common.out),
        Reflectance(a) => (commands::reflectance(a), &a.common.out),
        KkVerify(a) => (commands::kk_verify(a), &a.common.out),
    };
    let output = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            return exit_code(&e);
        }
    };
    for note in &output.notes {
        let _ = writeln!(err, "{note}");
    }
    let written = match dest {
        Some(path) => std::fs::write(path, &output.data)
            .map_err(|e| format!("writing {}: {e}", path.display())),
        None => out
            .write_all(output.data.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| format!("writing output: {e}")),
    };
    if let Err(msg) = written {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_FAILURE;
    }
    if output.check_failed {
        EXIT_CHECK
    } else {
        EXIT_OK
    }
}
