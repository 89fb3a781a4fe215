use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::CMatrix;

/// Largest allowed `omega * dt`.
pub const MAX_PHASE_PER_STEP: f64 = 0.01;

/// One measurement scenario: Hamiltonian `H = omega sx / 2 + epsilon sz`,
/// measurement strength `kappa`, and the time grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub omega: f64,
    pub epsilon: f64,
    pub kappa: f64,
    pub dt: f64,
    pub n_steps: usize,
    /// Keep every `record_stride`-th step in the output series.
    pub record_stride: usize,
    pub seed: u64,
}

impl SimConfig {
    /// `periods` Rabi periods at `steps_per_period` steps each, decimated to
    /// `output_points` samples after `t = 0`.
    pub fn for_periods(
        omega: f64,
        kappa: f64,
        periods: f64,
        steps_per_period: usize,
        output_points: usize,
        seed: u64,
    ) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega must be positive to define a Rabi period, got {omega}"
            )));
        }
        if steps_per_period == 0 || output_points == 0 || !(periods > 0.0) {
            return Err(Error::InvalidParameter(
                "periods, steps per period and output points must be positive".into(),
            ));
        }
        let dt = TAU / omega / steps_per_period as f64;
        let n_steps = (periods * steps_per_period as f64).round() as usize;
        let record_stride = (n_steps / output_points).max(1);
        let cfg = SimConfig {
            omega,
            epsilon: 0.0,
            kappa,
            dt,
            n_steps,
            record_stride,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `omega = 1`, `epsilon = 0`, 15 Rabi periods, 1000 output points.
    pub fn standard(kappa: f64, steps_per_period: usize, seed: u64) -> Result<Self> {
        Self::for_periods(1.0, kappa, 15.0, steps_per_period, 1000, seed)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return bad(format!("kappa must be >= 0, got {}", self.kappa));
        }
        if !self.omega.is_finite() || !self.epsilon.is_finite() {
            return bad("omega and epsilon must be finite".into());
        }
        if self.omega.abs() * self.dt > MAX_PHASE_PER_STEP {
            return bad(format!(
                "omega * dt = {} exceeds {MAX_PHASE_PER_STEP}",
                self.omega.abs() * self.dt
            ));
        }
        if self.n_steps == 0 {
            return bad("n_steps must be at least 1".into());
        }
        if self.record_stride == 0 {
            return bad("record_stride must be at least 1".into());
        }
        Ok(())
    }

    pub fn rabi_period(&self) -> f64 {
        TAU / self.omega
    }

    pub fn horizon(&self) -> f64 {
        self.n_steps as f64 * self.dt
    }

    /// Step indices kept in output series: `0, stride, 2 stride, ...` and
    /// always the final step.
    pub fn output_steps(&self) -> Vec<usize> {
        let mut steps: Vec<usize> = (0..=self.n_steps).step_by(self.record_stride).collect();
        if *steps.last().unwrap() != self.n_steps {
            steps.push(self.n_steps);
        }
        steps
    }

    pub fn output_times(&self) -> Vec<f64> {
        self.output_steps()
            .into_iter()
            .map(|s| s as f64 * self.dt)
            .collect()
    }

    pub fn hamiltonian(&self) -> CMatrix {
        CMatrix::pauli_x().scale(0.5 * self.omega) + CMatrix::pauli_z().scale(self.epsilon)
    }

    /// Rate multiplying `D[sz]` in every equation of motion. Twice `kappa`, so
    /// that together with the `sqrt(2 kappa)` innovation gain and the
    /// `sqrt(8 kappa)` record gain the detector is exactly efficient.
    pub fn dephasing_rate(&self) -> f64 {
        2.0 * self.kappa
    }

    /// `sqrt(8 kappa)`: drift gain of the measurement record.
    pub fn record_gain(&self) -> f64 {
        (8.0 * self.kappa).sqrt()
    }

    /// `sqrt(2 kappa)`: gain of the `H[sz]` innovation term.
    pub fn innovation_gain(&self) -> f64 {
        (2.0 * self.kappa).sqrt()
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}
