//! Command-line front end: ingestion, scoring, ego scans, validation and
//! fixture generation, writing JSON reports and per-digit CSV.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::ffi::OsString;

use clap::Parser;

pub use config::{Cli, Command, CommandKind, Flags, RunConfig};
pub use error::{exit, CliError};

/// Runs one resolved command and returns its exit code.
pub fn run(cfg: &RunConfig) -> Result<i32, CliError> {
    match cfg.command {
        CommandKind::Analyze => commands::cmd_analyze(cfg),
        CommandKind::Ego => commands::cmd_ego(cfg),
        CommandKind::Validate => commands::cmd_validate(cfg),
        CommandKind::Generate => commands::cmd_generate(cfg),
        CommandKind::PlotData => commands::cmd_plot_data(cfg),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> Result<i32, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Config(e.to_string()))?;
    let (kind, flags) = cli.command.split();
    let cfg = RunConfig::resolve(kind, flags)?;
    run(&cfg)
}
