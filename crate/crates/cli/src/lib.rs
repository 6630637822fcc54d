//! Command-line surface of `crg-core`: the function-spec parser, flag
//! validation and the subcommand runners. `run` is pure apart from rayon
//! parallelism inside the core, so tests drive it in-process.

// `!(x > y)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
pub mod config;
mod error;
pub mod output;
pub mod spec;

pub use commands::run;
pub use config::{Cli, RunConfig};
pub use error::CliError;
pub use output::Artifact;

use clap::Parser;

/// Parses an argument vector (program name first) into a validated config.
pub fn config_from_args<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    RunConfig::from_cli(cli)
}

/// Worker count from `CRG_THREADS`; `None` means rayon's default.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("CRG_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "CRG_THREADS must be a positive integer, got `{s}`"
            ))),
        },
        Err(e) => Err(CliError::Usage(format!("CRG_THREADS: {e}"))),
    }
}
