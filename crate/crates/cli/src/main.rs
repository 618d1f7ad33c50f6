//! `arena-eval`: simulate battle streams, replay them through rating
//! systems, and analyze what draws correlate with.
//!
//! Exit codes: 0 success, 1 usage/configuration error, 2 data error,
//! 3 numerical failure.

mod args;
mod commands;
mod config;

use clap::Parser;

use arena_ratings::Error;

/// Error carrying its process exit code.
#[derive(Debug)]
pub enum ExitError {
    Usage(String),
    Data(String),
    Numerical(String),
}

impl ExitError {
    fn usage(e: impl std::fmt::Display) -> Self {
        ExitError::Usage(e.to_string())
    }

    fn code(&self) -> i32 {
        match self {
            ExitError::Usage(_) => 1,
            ExitError::Data(_) => 2,
            ExitError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            ExitError::Usage(m) | ExitError::Data(m) | ExitError::Numerical(m) => m,
        }
    }
}

impl From<Error> for ExitError {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) => ExitError::Numerical(e.to_string()),
            _ => ExitError::Data(e.to_string()),
        }
    }
}

fn main() {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the error path too; those are
            // not usage errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };

    let result = match &cli.command {
        args::Command::Simulate(a) => commands::run_simulate(a),
        args::Command::Evaluate(a) => commands::run_evaluate(a),
        args::Command::Sweep(a) => commands::run_sweep(a),
        args::Command::Ablate(a) => commands::run_ablate(a),
        args::Command::Analyze(args::AnalyzeCommand::RrAnnotations(a)) => {
            commands::run_rr_annotations(a)
        }
        args::Command::Analyze(args::AnalyzeCommand::RrGap(a)) => commands::run_rr_gap(a),
        args::Command::Annotate(a) => commands::run_annotate(a),
    };

    if let Err(e) = result {
        eprintln!("error: {}", e.message());
        std::process::exit(e.code());
    }
}
