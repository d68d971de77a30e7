//! Command-line front end: CSV sweeps of error exponents and error
//! probabilities, and Monte Carlo runs.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;

use clap::Parser;
use twosource_core::Execution;

use crate::args::Cli;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) | CliError::Output(_) => 1,
        }
    }
}

impl From<twosource_core::Error> for CliError {
    fn from(e: twosource_core::Error) -> Self {
        use twosource_core::Error as E;
        match e {
            E::QuadratureFailure { .. } | E::OptimizationFailure(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Runs `f` with the requested worker count. One thread runs the
/// sequential code path.
#[cfg(feature = "parallel")]
pub fn with_threads<T, F>(threads: Option<usize>, f: F) -> Result<T, CliError>
where
    T: Send,
    F: FnOnce(Execution) -> T + Send,
{
    match threads {
        Some(0) => Err(CliError::Input("--threads must be positive".into())),
        Some(1) => Ok(f(Execution::Sequential)),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Input(format!("cannot start {n} threads: {e}")))?;
            Ok(pool.install(|| f(Execution::Parallel)))
        }
        None => Ok(f(Execution::Parallel)),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<T, F>(threads: Option<usize>, f: F) -> Result<T, CliError>
where
    F: FnOnce(Execution) -> T,
{
    if threads == Some(0) {
        return Err(CliError::Input("--threads must be positive".into()));
    }
    Ok(f(Execution::Sequential))
}

/// Parses already-expanded arguments and writes the CSV.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let common = cli.command.common();
    let table = with_threads(common.threads, |exec| commands::render(&cli.command, exec))??;
    match &common.out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| CliError::Input(format!("cannot create {}: {e}", path.display())))?;
            table.write_to(std::io::BufWriter::new(file))
        }
        None => table.write_to(std::io::stdout().lock()),
    }
}

/// Full entry point: config expansion, parsing, execution. Returns the
/// process exit code.
pub fn main_with_args(args: Vec<OsString>) -> i32 {
    let args = match config::expand(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("twosource: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("twosource: {e}");
            e.exit_code()
        }
    }
}
