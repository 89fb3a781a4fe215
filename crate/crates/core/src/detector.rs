//! Effective quantum-point-contact detector.
//!
//! Units are reduced: `hbar = e = 1`, so a bias `V` is also the energy `eV`,
//! temperature is `k_B T`, and the von Klitzing constant `h / e^2` is `2 pi`.
//! The detector feeds the dynamics only through the measurement strength
//! `kappa`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `h / e^2` in reduced units.
pub const KLITZING_REDUCED: f64 = 2.0 * PI;

/// Default `|dI| / I0` at or below which the detector counts as weakly
/// responding.
pub const WEAK_RESPONSE_THRESHOLD: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QpcParams {
    /// Single-channel transparency `D`.
    pub transparency: f64,
    /// Charge-dependent change `dD`; `D_L = D + dD`, `D_R = D - dD`.
    pub delta_transparency: f64,
    pub bias_voltage: f64,
    pub temperature: f64,
    pub klitzing_constant: f64,
}

impl QpcParams {
    pub fn new(
        transparency: f64,
        delta_transparency: f64,
        bias_voltage: f64,
        temperature: f64,
    ) -> Result<Self> {
        let p = QpcParams {
            transparency,
            delta_transparency,
            bias_voltage,
            temperature,
            klitzing_constant: KLITZING_REDUCED,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.transparency;
        let dd = self.delta_transparency;
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(d > 0.0 && d < 1.0) {
            return bad(format!("transparency {d} outside (0, 1)"));
        }
        if !(d + dd > 0.0 && d + dd < 1.0 && d - dd > 0.0 && d - dd < 1.0) {
            return bad(format!("D +/- dD = {d} +/- {dd} leaves (0, 1)"));
        }
        if !(self.bias_voltage > 0.0) {
            return bad(format!("bias voltage {} must be positive", self.bias_voltage));
        }
        if !(self.temperature >= 0.0) {
            return bad(format!("temperature {} must be >= 0", self.temperature));
        }
        if !(self.klitzing_constant > 0.0) {
            return bad("von Klitzing constant must be positive".into());
        }
        Ok(())
    }
}

/// Current noise spectral density of the point contact at angular frequency
/// `omega`:
///
/// `J(w) = (4 / R_K) D (1 - D) (eV - w) / [1 - exp(-(eV - w) / k_B T)]`,
/// which tends to `(4 / R_K) D (1 - D) (eV - w)` as `T -> 0`.
///
/// Only the shot-noise regime `eV > w` is supported.
pub fn noise_spectral_density(omega: f64, p: &QpcParams) -> Result<f64> {
    let excess = p.bias_voltage - omega;
    if !(excess > 0.0) {
        return Err(Error::Regime(format!(
            "bias {} must exceed the frequency {omega}",
            p.bias_voltage
        )));
    }
    let prefactor = 4.0 / p.klitzing_constant * p.transparency * (1.0 - p.transparency);
    let thermal = if p.temperature == 0.0 {
        1.0
    } else {
        // 1 - exp(-x), accurate for small x.
        -(-excess / p.temperature).exp_m1()
    };
    Ok(prefactor * excess / thermal)
}

/// Branch currents `(I_L, I_R)` with `I = D e^2 V / (pi hbar)`, together with
/// their difference and mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Currents {
    pub left: f64,
    pub right: f64,
    pub delta: f64,
    pub mean: f64,
}

pub fn currents(p: &QpcParams) -> Currents {
    let unit = p.bias_voltage / PI;
    let left = (p.transparency + p.delta_transparency) * unit;
    let right = (p.transparency - p.delta_transparency) * unit;
    Currents {
        left,
        right,
        delta: left - right,
        mean: 0.5 * (left + right),
    }
}

/// `kappa = dI^2 / (16 J(0))`.
pub fn measurement_strength(delta_current: f64, noise_floor: f64) -> Result<f64> {
    if !(noise_floor > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise floor {noise_floor} must be positive"
        )));
    }
    Ok(delta_current * delta_current / (16.0 * noise_floor))
}

/// Detector quantities derived from [`QpcParams`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub kappa: f64,
    pub delta_current: f64,
    pub noise_floor: f64,
    pub mean_current: f64,
}

impl DetectorModel {
    pub fn from_params(p: &QpcParams) -> Result<Self> {
        p.validate()?;
        let c = currents(p);
        let noise_floor = noise_spectral_density(0.0, p)?;
        Ok(DetectorModel {
            kappa: measurement_strength(c.delta, noise_floor)?,
            delta_current: c.delta,
            noise_floor,
            mean_current: c.mean,
        })
    }

    /// Drift coefficient of the measurement record written in detector
    /// quantities, `dI / sqrt(2 J(0))`. Equals `sqrt(8 kappa)` up to sign.
    pub fn record_gain(&self) -> f64 {
        self.delta_current / (2.0 * self.noise_floor).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakResponseReport {
    /// `|dI| / I0`.
    pub ratio: f64,
    /// Electrons needed to resolve the charge state, `(I0 / dI)^2`.
    pub electron_count: f64,
    pub threshold: f64,
    pub weakly_responding: bool,
}

/// Linear-response diagnostic. The threshold is reported, never enforced.
pub fn weak_response_check(model: &DetectorModel) -> Result<WeakResponseReport> {
    weak_response_check_with(model, WEAK_RESPONSE_THRESHOLD)
}

pub fn weak_response_check_with(model: &DetectorModel, threshold: f64) -> Result<WeakResponseReport> {
    if model.mean_current == 0.0 {
        return Err(Error::InvalidParameter("mean current is zero".into()));
    }
    let ratio = (model.delta_current / model.mean_current).abs();
    let electron_count = if model.delta_current == 0.0 {
        f64::INFINITY
    } else {
        (model.mean_current / model.delta_current).powi(2)
    };
    Ok(WeakResponseReport {
        ratio,
        electron_count,
        threshold,
        weakly_responding: ratio <= threshold,
    })
}
