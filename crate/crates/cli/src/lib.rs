//! Command-line front end for `hornlab-core`.
//!
//! Exit codes: 0 when a result was computed (including a nonmember verdict),
//! 1 for usage and input errors, 2 when a size cap or precondition refuses
//! the request, 3 for internal invariant or numerical failures.

pub mod args;
pub mod commands;
pub mod error;
pub mod redundancy;

use std::ffi::OsString;

use clap::Parser;

pub use error::{CliError, CliResult};

/// Environment variable capping the worker pool.
pub const THREADS_VAR: &str = "HORNLAB_THREADS";

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {value:?}")))?;
    // A second build in the same process fails harmlessly.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = configure_threads().and_then(|()| {
        let mut buffer = Vec::new();
        let target = commands::execute(cli, &mut buffer)?;
        commands::write_output(target.as_deref(), &buffer)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("hornlab: {e}");
            e.exit_code()
        }
    }
}
