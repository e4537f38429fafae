mod args;
mod commands;
mod fock_expr;
mod literal;
mod output;

use std::process::ExitCode;

use clap::Parser;
use selfsim_core::Error;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments; exit status 2.
    Usage(String),
    /// A well-formed request that could not be completed; exit status 1.
    Failure(String),
}

impl CliError {
    /// Core errors raised while validating user input.
    pub fn usage(err: Error) -> Self {
        match err {
            Error::StageCapExceeded { .. } => err.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::StageCapExceeded { cap } => CliError::Failure(format!(
                "stage cap {cap} exceeded; retry with --stage-cap {}",
                cap.saturating_mul(2).max(cap + 8)
            )),
            Error::InvalidParams(_)
            | Error::InvalidStage(_)
            | Error::IndexOutOfRange { .. }
            | Error::InvalidPoint { .. }
            | Error::NotInInvariantSet { .. }
            | Error::GridNotDivisible { .. }
            | Error::NotCoprime { .. }
            | Error::NotPisot(_)
            | Error::InvalidQ
            | Error::StageTooLow => CliError::Usage(err.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    let result = args::RunConfig::from_cli(&cli).and_then(|config| {
        let report = commands::run(&cli, &config)?;
        report
            .emit(config.format, config.output.as_deref())
            .map_err(|e| CliError::Failure(format!("writing output: {e}")))
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
