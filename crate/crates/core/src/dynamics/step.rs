//! Single steps of the conditioned, filtered and ensemble-averaged dynamics.
//!
//! The conditioned state and the filter share one update: given a record
//! increment `dy`, apply the diagonal measurement operator
//! `M(dy) = (1 + k (dy^2 - 2 dt) / 2) I + sqrt(k) dy sz` with `k = 2 kappa`,
//! renormalize, then rotate with the exact propagator `exp(-i H dt)`.
//! Expanding to first order in `dt` reproduces
//!
//! `d rho = -i[H, rho] dt + k D[sz] rho dt + sqrt(2 kappa) H[sz] rho (dy - sqrt(8 kappa) <sz> dt)`,
//!
//! which is the conditioned master equation when `dy` is generated from the
//! same state and the filter equation otherwise. Pure states stay pure and
//! positivity holds step by step.

use num_complex::Complex64;

use super::config::SimConfig;
use super::superop::{dissipator, hamiltonian_flow, meas_superop, sz_expectation};
use crate::error::{Error, Result};
use crate::qstate::{min_eigenvalue, CMatrix, DensityMatrix, NEGATIVITY_TOL};

/// `exp(-i H t)` for `H = h . sigma`, `h = (omega / 2, 0, epsilon)`.
pub fn propagator(cfg: &SimConfig, t: f64) -> CMatrix {
    let hx = 0.5 * cfg.omega;
    let hz = cfg.epsilon;
    let norm = hx.hypot(hz);
    if norm == 0.0 {
        return CMatrix::identity(2);
    }
    let (s, c) = (norm * t).sin_cos();
    let (nx, nz) = (hx / norm, hz / norm);
    let i = Complex64::new(0.0, 1.0);
    CMatrix::from_row_major(&[
        c - i * s * nz,
        -i * s * nx,
        -i * s * nx,
        c + i * s * nz,
    ])
    .unwrap()
}

/// Precomputed per-step constants.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Stepper {
    dt: f64,
    dephasing: f64,
    sqrt_dephasing: f64,
    record_gain: f64,
    unitary: CMatrix,
    unitary_adj: CMatrix,
}

impl Stepper {
    pub(crate) fn new(cfg: &SimConfig) -> Self {
        let unitary = propagator(cfg, cfg.dt);
        Stepper {
            dt: cfg.dt,
            dephasing: cfg.dephasing_rate(),
            sqrt_dephasing: cfg.dephasing_rate().sqrt(),
            record_gain: cfg.record_gain(),
            unitary,
            unitary_adj: unitary.adjoint(),
        }
    }

    #[inline]
    pub(crate) fn record_increment(&self, rho: &CMatrix, dw: f64) -> f64 {
        self.record_gain * sz_expectation(rho) * self.dt + dw
    }

    #[inline]
    pub(crate) fn update(&self, rho: &CMatrix, dy: f64) -> Result<CMatrix> {
        let a = 1.0 + 0.5 * self.dephasing * (dy * dy - 2.0 * self.dt);
        let b = self.sqrt_dephasing * dy;
        let m = [a + b, a - b];
        let mut out = *rho;
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] *= m[i] * m[j];
            }
        }
        let out = self.unitary * out * self.unitary_adj;
        normalize_checked(&out)
    }
}

/// Hermitizes, renormalizes and applies the positivity floor.
pub(crate) fn normalize_checked(m: &CMatrix) -> Result<CMatrix> {
    let h = m.hermitize();
    let tr = h.trace().re;
    if !(tr > 0.0 && tr.is_finite()) {
        return Err(Error::InvalidState(format!("trace {tr} after step")));
    }
    let h = h.scale(1.0 / tr);
    let min = min_eigenvalue(&h);
    if !(min >= -NEGATIVITY_TOL) {
        return Err(Error::InvalidState(format!(
            "eigenvalue {min:e} after step; reduce dt"
        )));
    }
    Ok(h)
}

/// Record increment `dy = sqrt(8 kappa) <sz>_R dt + dW`.
pub fn record_increment(rho_r: &DensityMatrix, cfg: &SimConfig, dw: f64) -> f64 {
    cfg.record_gain() * sz_expectation(rho_r.matrix()) * cfg.dt + dw
}

/// One step of the conditioned state driven by the Wiener increment `dw`.
pub fn step_sme(rho: &DensityMatrix, cfg: &SimConfig, dw: f64) -> Result<DensityMatrix> {
    let dy = record_increment(rho, cfg, dw);
    step_filter(rho, cfg, dy)
}

/// One step of the filter consuming the observed record increment `dy`.
pub fn step_filter(rho_e: &DensityMatrix, cfg: &SimConfig, dy: f64) -> Result<DensityMatrix> {
    check_qubit(rho_e)?;
    Stepper::new(cfg)
        .update(rho_e.matrix(), dy)
        .map(DensityMatrix::from_trusted)
}

fn check_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(rho.dim(), 2));
    }
    Ok(())
}

/// Right-hand side of the ensemble-averaged master equation,
/// `-i[H, rho] + k D[sz] rho`.
pub(crate) fn lindblad_rhs(h: &CMatrix, dephasing: f64, rho: &CMatrix) -> CMatrix {
    hamiltonian_flow(h, rho) + dissipator(&CMatrix::pauli_z(), rho).scale(dephasing)
}

/// Right-hand side of the nonstochastic filter,
/// `-i[H, rho] + k D[sz] rho + sqrt(2 kappa) H[sz] rho * sqrt(8 kappa) (<sz>_R - <sz>_E)`.
pub(crate) fn ensemble_filter_rhs(cfg: &SimConfig, h: &CMatrix, rho_e: &CMatrix, sz_r: f64) -> CMatrix {
    let forcing = cfg.innovation_gain() * cfg.record_gain() * (sz_r - sz_expectation(rho_e));
    lindblad_rhs(h, cfg.dephasing_rate(), rho_e)
        + meas_superop(&CMatrix::pauli_z(), rho_e).scale(forcing)
}

/// One classical RK4 step of the nonstochastic filter with `<sz>_R` held at
/// `sz_r_mean` over the step. Positivity is not guaranteed by this equation;
/// an eigenvalue below `-1e-9` is reported as [`Error::Positivity`].
pub fn step_ensemble_filter(
    rho_e: &DensityMatrix,
    sz_r_mean: f64,
    cfg: &SimConfig,
) -> Result<DensityMatrix> {
    check_qubit(rho_e)?;
    let h = cfg.hamiltonian();
    let f = |m: &CMatrix| ensemble_filter_rhs(cfg, &h, m, sz_r_mean);
    let dt = cfg.dt;
    let y = *rho_e.matrix();
    let k1 = f(&y);
    let k2 = f(&(y + k1.scale(0.5 * dt)));
    let k3 = f(&(y + k2.scale(0.5 * dt)));
    let k4 = f(&(y + k3.scale(dt)));
    let next = y + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0);
    positivity_checked(&next, dt).map(DensityMatrix::from_trusted)
}

pub(crate) fn positivity_checked(m: &CMatrix, time: f64) -> Result<CMatrix> {
    let h = m.hermitize();
    let tr = h.trace().re;
    let h = h.scale(1.0 / tr);
    let min = min_eigenvalue(&h);
    if !(min >= -NEGATIVITY_TOL) {
        return Err(Error::Positivity {
            time,
            min_eigenvalue: min,
        });
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{purity, sampling::StateSampler, BlochVector};

    fn cfg(kappa: f64) -> SimConfig {
        SimConfig::standard(kappa, 10_000, 1).unwrap()
    }

    #[test]
    fn unmeasured_step_is_unitary() {
        let c = cfg(0.0);
        let mut s = StateSampler::new(1);
        let u = propagator(&c, c.dt);
        for dw in [-0.3, 0.0, 0.7] {
            let rho = s.pure(2);
            let next = step_sme(&rho, &c, dw).unwrap();
            assert!((purity(&next) - 1.0).abs() < 1e-10);
            let expected = u * *rho.matrix() * u.adjoint();
            assert!(next.matrix().max_abs_diff(&expected) < 1e-15);
            // The filter ignores the record when kappa = 0.
            let filtered = step_filter(&rho, &c, dw).unwrap();
            assert!(filtered.max_abs_diff(&next) < 1e-15);
        }
    }

    #[test]
    fn eigenprojector_only_rotates() {
        let c = cfg(0.005);
        let l = DensityMatrix::left();
        let u = propagator(&c, c.dt);
        let expected = u * *l.matrix() * u.adjoint();
        for dw in [-0.05, 0.0, 0.02] {
            let next = step_sme(&l, &c, dw).unwrap();
            assert!(next.matrix().max_abs_diff(&expected) < 1e-15);
        }
    }

    #[test]
    fn filter_coincides_with_conditioned_step_on_shared_state() {
        let c = cfg(0.005);
        let mut s = StateSampler::new(8);
        for _ in 0..20 {
            let rho = s.bloch_ball();
            let dw = 0.01;
            let dy = record_increment(&rho, &c, dw);
            assert_eq!(step_sme(&rho, &c, dw).unwrap(), step_filter(&rho, &c, dy).unwrap());
        }
    }

    #[test]
    fn record_increment_examples() {
        let c = cfg(0.005);
        let l = DensityMatrix::left();
        assert!((record_increment(&l, &c, 0.0) - 0.2 * c.dt).abs() < 1e-17);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert_eq!(record_increment(&mixed, &c, 0.123), 0.123);
    }

    #[test]
    fn propagator_is_rabi_rotation() {
        let c = cfg(0.0);
        let t = 0.37;
        let u = propagator(&c, t);
        let rho = u * *DensityMatrix::left().matrix() * u.adjoint();
        assert!((rho[(0, 0)].re - (0.5 * t).cos().powi(2)).abs() < 1e-15);
        let full = propagator(&c, c.rabi_period());
        assert!((full * full.adjoint()).max_abs_diff(&CMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn propagator_with_level_splitting_matches_series() {
        let c = SimConfig {
            epsilon: 0.3,
            ..cfg(0.0)
        };
        // Oracle: truncated Taylor series of exp(-i H t).
        let h = c.hamiltonian();
        let t = 0.8;
        let mut term = CMatrix::identity(2);
        let mut sum = term;
        for n in 1..40 {
            term = (term * h).scale_complex(Complex64::new(0.0, -t / n as f64));
            sum += term;
        }
        assert!(propagator(&c, t).max_abs_diff(&sum) < 1e-14);
    }

    #[test]
    fn ensemble_filter_without_forcing_is_a_lindblad_step() {
        let c = cfg(0.005);
        let rho = BlochVector::new(0.3, -0.2, 0.5).unwrap().to_density();
        let sz = sz_expectation(rho.matrix());
        let next = step_ensemble_filter(&rho, sz, &c).unwrap();
        let lindblad = *rho.matrix()
            + lindblad_rhs(&c.hamiltonian(), c.dephasing_rate(), rho.matrix()).scale(c.dt);
        // Agreement up to O(dt^2) terms.
        assert!(next.matrix().max_abs_diff(&lindblad) < 1e-6);
    }

    #[test]
    fn ensemble_filter_without_measurement_rotates() {
        let c = cfg(0.0);
        let rho = DensityMatrix::left();
        let next = step_ensemble_filter(&rho, -1.0, &c).unwrap();
        let u = propagator(&c, c.dt);
        let expected = u * *rho.matrix() * u.adjoint();
        assert!(next.matrix().max_abs_diff(&expected) < 1e-13);
    }
}
