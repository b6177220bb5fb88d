//! Command-line front end for `atomflux`.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;

use clap::Parser;

pub use args::{Cli, Command};
pub use config::{Format, RunConfig};
pub use error::CliError;

/// Builds the effective run config: defaults, then the config file, then flags.
pub fn effective_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match &cli.command {
        Command::Constants(a) | Command::Spectra(a) | Command::Fit(a) => a.apply(&mut cfg)?,
        Command::Simulate(a) => a.apply(&mut cfg)?,
    }
    Ok(cfg)
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = effective_config(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.map_or(0, usize::from))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Constants(_) => commands::run_constants(&cfg),
        Command::Spectra(_) => commands::run_spectra(&cfg),
        Command::Fit(_) => commands::run_fit(&cfg),
        Command::Simulate(a) => commands::run_simulate(
            &cfg,
            &commands::SimulateExtras {
                tolerance: a.tolerance,
                report: a.report.as_deref(),
                dump: a.dump_trajectory.as_deref().map(|p| (p, a.dump_ensemble)),
            },
        ),
    })
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
