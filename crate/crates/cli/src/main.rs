mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Context;
use erwd::par::Execution;

#[derive(Debug)]
pub enum CliError {
    Lib(erwd::Error),
    Io(std::io::Error),
    Usage(String),
}

impl From<erwd::Error> for CliError {
    fn from(e: erwd::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use erwd::Error::*;
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(Domain(_) | Divergent(_) | MissingGreens { .. }) => 3,
            CliError::Lib(Budget(_) | Resource(_)) => 4,
            CliError::Lib(Accuracy(_)) => 5,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
        }
    }
}

fn configure_workers(workers: Option<usize>) -> Result<Execution, CliError> {
    match workers {
        Some(0) => Err(CliError::Usage("--workers must be at least 1".into())),
        Some(1) => Ok(Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))?;
            Ok(Execution::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Execution::Sequential),
        None => Ok(Execution::Parallel),
    }
}

fn run(cli: Cli, argv: Vec<String>) -> Result<(), CliError> {
    let exec = configure_workers(cli.global.workers)?;
    let ctx = Context { argv, global: cli.global, exec };
    match &cli.command {
        Command::Simulate(a) => commands::simulate(&ctx, a),
        Command::Sweep(a) => commands::sweep(&ctx, a),
        Command::Greens(a) => commands::greens(&ctx, a),
        Command::Bounds(a) => commands::bounds(&ctx, a),
        Command::FindBeta0(a) => commands::find_beta0(&ctx, a),
        Command::Enumerate(a) => commands::enumerate(&ctx, a),
        Command::Couple(a) => commands::couple(&ctx, a),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
