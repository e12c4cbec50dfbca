//! Command-line front end for `bellscope-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;

use bellscope_core::OptimizeMode;
use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{ExperimentConfig, GridTarget, Overrides};
use crate::error::{CliError, CliResult};
use crate::report::{ReportEnvelope, Results};

pub const THREADS_ENV: &str = "BELLSCOPE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "bellscope", version, about = "Correlation bounds, conservation checks and Bell-test ensembles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment config (JSON). Defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Directory for output files.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Optimize the settings instead of evaluating them (chsh).
    #[arg(long, global = true, value_enum)]
    pub optimize: Option<Mode>,
    /// Grid size: optimizer grid (chsh), angles (scan, verify) or values of c (pr-spectrum).
    #[arg(long, global = true, value_name = "N")]
    pub grid: Option<usize>,
    /// Trials per setting pair (simulate).
    #[arg(long, global = true, value_name = "N")]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Evaluate or optimize the CHSH quantity of the configured model.
    Chsh,
    /// Tabulate joint probabilities and correlation against the angle difference.
    Scan,
    /// Run the invariant suite; exit 1 if any check fails.
    Verify,
    /// Tabulate CHSH and conservation deviation across the generalized PR family.
    PrSpectrum,
    /// Generate a seeded ensemble and analyse it.
    Simulate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Min,
    Max,
}

impl From<Mode> for OptimizeMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Min => OptimizeMode::Minimize,
            Mode::Max => OptimizeMode::Maximize,
        }
    }
}

impl Cli {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            out: self.out.clone(),
            optimize: self.optimize.map(Into::into),
            grid: self.grid,
            n: self.n,
        }
    }

    pub fn effective_config(&self) -> CliResult<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(self.config.as_deref())?;
        let target = match self.command {
            Command::Chsh => GridTarget::Optimizer,
            Command::Scan | Command::Verify => GridTarget::Scan,
            Command::PrSpectrum => GridTarget::Spectrum,
            Command::Simulate => GridTarget::None,
        };
        cfg.apply(&self.overrides(), target)?;
        Ok(cfg)
    }
}

/// Reads the thread-count override; `None` leaves rayon's default.
pub fn threads_from_env() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Config(format!("{THREADS_ENV}: {e}"))),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

/// Runs one command, writing its primary output to `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let cfg = cli.effective_config()?;
    match cli.command {
        Command::Chsh => commands::chsh(&cfg, stdout).map(drop),
        Command::Scan => commands::scan(&cfg, stdout),
        Command::PrSpectrum => commands::pr_spectrum(&cfg, stdout),
        Command::Simulate => commands::simulate(&cfg, stdout).map(drop),
        Command::Verify => {
            let summary = verify::run(&cfg)?;
            let failed: Vec<String> =
                summary.failures().map(|c| format!("{} (deviation {:e})", c.name, c.deviation)).collect();
            let env = ReportEnvelope::new(cfg, Results::Verify(summary));
            stdout.write_all(env.to_json().as_bytes())?;
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Check(failed.join(", ")))
            }
        }
    }
}
