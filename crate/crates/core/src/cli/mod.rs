//! Command-line driver: configuration, subcommands and CSV/JSON artifacts.

mod commands;
mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_discord, cmd_ensemble, cmd_goalprog, cmd_sweep, cmd_trajectory, Report};
pub use config::{
    DiscordSection, EnsembleSection, ExperimentConfig, GoalScenario, GoalSection, SimSection,
    SweepSection, DEFAULT_SEED, FORMAT_VERSION,
};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "qfilter", version, about = "Continuous weak measurement simulator and state estimator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: GlobalOpts,
}

#[derive(Debug, Subcommand, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// One realization: states, populations and metrics over time.
    Trajectory,
    /// Averages over many realizations with standard errors.
    Ensemble,
    /// Confidence/backaction/epitome surfaces over (t, kappa).
    Sweep,
    /// Goal-programming objective maps for the configured scenarios.
    Goalprog,
    /// Random-state check of the discord lower bound.
    Discord,
}

#[derive(Debug, Args, Clone, Default)]
pub struct GlobalOpts {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true, env = "QFILTER_SEED")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = "QFILTER_OUT", value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Coarser time step.
    #[arg(long, global = true)]
    pub fast: bool,
    /// Worker threads (does not affect results).
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    /// Measurement strength.
    #[arg(long, global = true, value_name = "X")]
    pub kappa: Option<f64>,
    /// Horizon in Rabi periods.
    #[arg(long, global = true, value_name = "N")]
    pub periods: Option<f64>,
    /// Ensemble size.
    #[arg(long, global = true, value_name = "N")]
    pub realizations: Option<usize>,
    /// Add the nonstochastic filter population to the ensemble output.
    #[arg(long, global = true)]
    pub compare_me2: bool,
}

/// Configuration file (or defaults) with command-line overrides applied.
pub fn resolve_config(opts: &GlobalOpts) -> Result<ExperimentConfig> {
    let mut cfg = match &opts.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &opts.out {
        cfg.out_dir = out.clone();
    }
    if opts.fast {
        cfg.fast = true;
    }
    if let Some(k) = opts.kappa {
        cfg.sim.kappa = k;
    }
    if let Some(p) = opts.periods {
        cfg.sim.periods = p;
    }
    if let Some(n) = opts.realizations {
        cfg.ensemble.realizations = n;
    }
    if opts.compare_me2 {
        cfg.ensemble.compare_me2 = true;
    }
    if opts.workers == Some(0) {
        return Err(Error::Config("--workers must be at least 1".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(cli: &Cli) -> Result<Report> {
    let cfg = resolve_config(&cli.opts)?;
    let w = cli.opts.workers;
    match cli.command {
        Command::Trajectory => cmd_trajectory(&cfg),
        Command::Ensemble => cmd_ensemble(&cfg, w),
        Command::Sweep => cmd_sweep(&cfg, w),
        Command::Goalprog => cmd_goalprog(&cfg, w),
        Command::Discord => cmd_discord(&cfg, w),
    }
}

/// 0 success, 1 I/O, 2 configuration, 3 numerical failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 1,
        Error::Trajectory { source, .. } => exit_code(source),
        e if e.is_numerical() => 3,
        _ => 2,
    }
}
