//! The `hypersint` command line: argument and config resolution, the five
//! subcommands, and deterministic JSON/CSV output.
//!
//! Exit codes: 0 success, 1 a hard verification check failed, 2 invalid
//! configuration or parameters, 3 solver or quadrature failure.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use crate::error::Error;
use config::{seed_from_env, Cli, Command, RunConfig};
use output::{write_atomic, Document};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SolverFailure { .. } | Error::QuadratureFailure(_) | Error::NoConvergence(_) => EXIT_SOLVER,
        _ => EXIT_CONFIG,
    }
}

fn execute(cfg: &RunConfig) -> Result<(Document, bool), Error> {
    match cfg.command {
        Command::Spectrum => commands::cmd_spectrum(cfg).map(|d| (d, true)),
        Command::Wavefunction => commands::cmd_wavefunction(cfg).map(|d| (d, true)),
        Command::Roots => commands::cmd_roots(cfg).map(|d| (d, true)),
        Command::Interbasis => commands::cmd_interbasis(cfg).map(|d| (d, true)),
        Command::Verify => verify::cmd_verify(cfg),
    }
}

/// Parse `args` (program name first), run, write output; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = seed_from_env()
        .and_then(|seed| RunConfig::resolve(cli.command, &cli.flags, seed))
        .and_then(|cfg| execute(&cfg).and_then(|(doc, ok)| Ok((doc.render(cfg.format)?, ok, cfg))));
    match result {
        Ok((text, ok, cfg)) => {
            let written = match &cfg.out {
                Some(path) => write_atomic(path, &text),
                None => std::io::stdout().write_all(text.as_bytes()).map_err(Error::from),
            };
            if let Err(e) = written {
                eprintln!("hypersint: {e}");
                return EXIT_CONFIG;
            }
            if ok {
                EXIT_OK
            } else {
                eprintln!("hypersint: at least one hard check failed");
                EXIT_VERIFY_FAILED
            }
        }
        Err(e) => {
            eprintln!("hypersint: {e}");
            exit_code(&e)
        }
    }
}
