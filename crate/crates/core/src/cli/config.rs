//! Experiment configuration: a TOML document with one table per subcommand.
//!
//! Every key is optional and defaults to the standard scenario; unknown keys
//! are rejected. See `configs/default.toml` at the repository root for the
//! full grammar with defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::SimConfig;
use crate::error::{Error, Result};
use crate::goalprog::{linspace, GoalConfig, DEFAULT_KAPPA_RANGE, DEFAULT_T_RANGE, SCENARIOS};

/// Version of the CSV/JSON output layout.
pub const FORMAT_VERSION: u32 = 1;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub format_version: u32,
    pub scenario: String,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Use `sim.fast_steps_per_period` instead of `sim.steps_per_period`.
    pub fast: bool,
    pub sim: SimSection,
    pub ensemble: EnsembleSection,
    pub sweep: SweepSection,
    pub goalprog: GoalSection,
    pub discord: DiscordSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    pub omega: f64,
    pub epsilon: f64,
    pub kappa: f64,
    /// Horizon in Rabi periods.
    pub periods: f64,
    pub steps_per_period: usize,
    pub fast_steps_per_period: usize,
    /// Output samples after `t = 0`.
    pub output_points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleSection {
    pub realizations: usize,
    pub compare_me2: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub t_points: usize,
    pub t_min: f64,
    /// Rabi periods.
    pub t_max: f64,
    pub kappa_points: usize,
    pub kappa_min: f64,
    pub kappa_max: f64,
    /// Step of the deterministic integration behind the surfaces.
    pub steps_per_period: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalScenario {
    pub name: String,
    pub eta1: f64,
    pub eta2: f64,
    pub delta_c: f64,
    pub delta_b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GoalSection {
    pub scenarios: Vec<GoalScenario>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiscordSection {
    pub states: usize,
    pub bases: usize,
    pub resolution: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            format_version: FORMAT_VERSION,
            scenario: "standard".into(),
            seed: DEFAULT_SEED,
            out_dir: PathBuf::from("out"),
            fast: false,
            sim: SimSection::default(),
            ensemble: EnsembleSection::default(),
            sweep: SweepSection::default(),
            goalprog: GoalSection::default(),
            discord: DiscordSection::default(),
        }
    }
}

impl Default for SimSection {
    fn default() -> Self {
        SimSection {
            omega: 1.0,
            epsilon: 0.0,
            kappa: 0.005,
            periods: 15.0,
            steps_per_period: 150_000,
            fast_steps_per_period: 10_000,
            output_points: 1000,
        }
    }
}

impl Default for EnsembleSection {
    fn default() -> Self {
        EnsembleSection {
            realizations: 2000,
            compare_me2: false,
        }
    }
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            t_points: 100,
            t_min: DEFAULT_T_RANGE.0,
            t_max: DEFAULT_T_RANGE.1,
            kappa_points: 100,
            kappa_min: DEFAULT_KAPPA_RANGE.0,
            kappa_max: DEFAULT_KAPPA_RANGE.1,
            steps_per_period: 2000,
        }
    }
}

impl Default for GoalSection {
    fn default() -> Self {
        GoalSection {
            scenarios: SCENARIOS
                .iter()
                .map(|&(name, eta1, eta2, delta)| GoalScenario {
                    name: name.into(),
                    eta1,
                    eta2,
                    delta_c: delta,
                    delta_b: delta,
                })
                .collect(),
        }
    }
}

impl Default for DiscordSection {
    fn default() -> Self {
        DiscordSection {
            states: 200,
            bases: 50,
            resolution: crate::discord::DEFAULT_RESOLUTION,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.format_version != FORMAT_VERSION {
            return bad(format!(
                "format_version {} is not supported (expected {FORMAT_VERSION})",
                self.format_version
            ));
        }
        if self.ensemble.realizations == 0 {
            return bad("ensemble.realizations must be at least 1".into());
        }
        let s = &self.sweep;
        if s.t_points == 0 || s.kappa_points == 0 {
            return bad("sweep grids must have at least one point".into());
        }
        if !(s.t_min >= 0.0 && s.t_max >= s.t_min && s.kappa_min >= 0.0 && s.kappa_max >= s.kappa_min) {
            return bad("sweep ranges must be nonnegative and ordered".into());
        }
        if self.discord.states == 0 || self.discord.bases == 0 {
            return bad("discord.states and discord.bases must be positive".into());
        }
        if self.discord.resolution < 8 {
            return bad("discord.resolution must be at least 8".into());
        }
        if self.goalprog.scenarios.is_empty() {
            return bad("goalprog.scenarios is empty".into());
        }
        self.sim_config().map_err(as_config)?;
        self.sweep_template().map_err(as_config)?;
        for g in self.goal_configs() {
            g.validate().map_err(as_config)?;
        }
        Ok(())
    }

    pub fn steps_per_period(&self) -> usize {
        if self.fast {
            self.sim.fast_steps_per_period
        } else {
            self.sim.steps_per_period
        }
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        let s = &self.sim;
        let mut cfg = SimConfig::for_periods(
            s.omega,
            s.kappa,
            s.periods,
            self.steps_per_period(),
            s.output_points,
            self.seed,
        )?;
        cfg.epsilon = s.epsilon;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Hamiltonian and step for the surfaces; `kappa` is set per column.
    pub fn sweep_template(&self) -> Result<SimConfig> {
        let s = &self.sim;
        let mut cfg = SimConfig::for_periods(
            s.omega,
            s.kappa,
            self.sweep.t_max.max(1.0),
            self.sweep.steps_per_period,
            1,
            self.seed,
        )?;
        cfg.epsilon = s.epsilon;
        Ok(cfg)
    }

    pub fn t_grid(&self) -> Vec<f64> {
        linspace(self.sweep.t_min, self.sweep.t_max, self.sweep.t_points)
    }

    pub fn kappa_grid(&self) -> Vec<f64> {
        linspace(self.sweep.kappa_min, self.sweep.kappa_max, self.sweep.kappa_points)
    }

    pub fn goal_configs(&self) -> Vec<GoalConfig> {
        self.goalprog
            .scenarios
            .iter()
            .map(|s| GoalConfig {
                eta1: s.eta1,
                eta2: s.eta2,
                delta_c: s.delta_c,
                delta_b: s.delta_b,
                t_grid: self.t_grid(),
                kappa_grid: self.kappa_grid(),
            })
            .collect()
    }

    /// SHA-256 (first 16 hex digits) of the canonical serialization with the
    /// output directory blanked, so moving outputs does not change headers.
    pub fn hash(&self) -> Result<String> {
        let mut c = self.clone();
        c.out_dir = PathBuf::new();
        let digest = Sha256::digest(c.to_toml()?.as_bytes());
        Ok(digest.iter().take(8).map(|b| format!("{b:02x}")).collect())
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}
