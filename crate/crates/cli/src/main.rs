//! `coarea`: generate instances, run the individual stages, verify the
//! length inequality, sweep ε and search for counterexamples.
//!
//! Exit codes: 0 pass, 1 verdict fail, 2 config error, 3 I/O or parse error.

mod commands;
mod config;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{load_config, Command};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "coarea", version, about, propagate_version = true)]
#[command(after_help = "Exit codes: 0 pass, 1 verdict fail, 2 config error, 3 I/O or parse error.\n\
ALL_SEED=<u64> replaces every configured seed before the run is hashed.")]
struct Cli {
    /// Worker threads; changes wall time, never output bytes.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Re-run the configuration embedded in a previous output file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

fn seed_override() -> Result<Option<u64>, CliError> {
    match std::env::var("ALL_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::config(format!("ALL_SEED must be an unsigned integer, got `{v}`"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::config(format!("ALL_SEED: {e}"))),
    }
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(CliError::config("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("--jobs: {e}")))?;
    }
    let mut cmd = match (cli.config, cli.command) {
        (Some(path), None) => load_config(&path)?,
        (None, Some(cmd)) => cmd,
        _ => return Err(CliError::config("give either a subcommand or --config FILE")),
    };
    if let Some(seed) = seed_override()? {
        cmd.override_seed(seed);
    }
    commands::run(&cmd, &cli.out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { error::EXIT_CONFIG } else { error::EXIT_PASS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
