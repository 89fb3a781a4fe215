//! Integrators producing output series on the configured time grid.

use super::config::SimConfig;
use super::step::{
    ensemble_filter_rhs, lindblad_rhs, normalize_checked, positivity_checked, propagator, Stepper,
};
use super::superop::sz_expectation;
use super::wiener::WienerStream;
use crate::error::{Error, Result};
use crate::qstate::{CMatrix, DensityMatrix};

/// Time-indexed states.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSeries {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl StateSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Left-dot populations `P_L(t)`.
    pub fn populations(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.population(0)).collect()
    }
}

/// One co-evolved realization: conditioned state, filter estimate and the
/// unmeasured reference, all on the output grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub rho_r: Vec<DensityMatrix>,
    pub rho_e: Vec<DensityMatrix>,
    pub rho_i: Vec<DensityMatrix>,
    /// Record accumulated over the output interval ending at each time
    /// (zero at `t = 0`).
    pub dy: Vec<f64>,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn check_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(rho.dim(), 2));
    }
    Ok(())
}

/// Unmeasured evolution evaluated in closed form at each output time.
pub fn run_ideal(cfg: &SimConfig, rho0: &DensityMatrix) -> Result<StateSeries> {
    cfg.validate()?;
    check_qubit(rho0)?;
    let times = cfg.output_times();
    let states = times.iter().map(|&t| ideal_state(cfg, rho0, t)).collect();
    Ok(StateSeries { times, states })
}

/// `U(t) rho0 U(t)^dagger`.
pub fn ideal_state(cfg: &SimConfig, rho0: &DensityMatrix, t: f64) -> DensityMatrix {
    let u = propagator(cfg, t);
    DensityMatrix::from_trusted((u * *rho0.matrix() * u.adjoint()).hermitize())
}

fn rk4<F: Fn(&CMatrix) -> CMatrix>(f: F, y: &CMatrix, h: f64) -> CMatrix {
    let k1 = f(y);
    let k2 = f(&(*y + k1.scale(0.5 * h)));
    let k3 = f(&(*y + k2.scale(0.5 * h)));
    let k4 = f(&(*y + k3.scale(h)));
    *y + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0)
}

/// Ensemble-averaged (Lindblad) evolution `d rho/dt = -i[H, rho] + 2 kappa D[sz] rho`,
/// integrated with classical RK4 at the configured step.
pub fn run_lindblad(cfg: &SimConfig, rho0: &DensityMatrix) -> Result<StateSeries> {
    cfg.validate()?;
    check_qubit(rho0)?;
    let h = cfg.hamiltonian();
    let k = cfg.dephasing_rate();
    let out = cfg.output_steps();
    let mut times = Vec::with_capacity(out.len());
    let mut states = Vec::with_capacity(out.len());
    let mut rho = *rho0.matrix();
    let mut next_out = 0;
    for step in 0..=cfg.n_steps {
        if step > 0 {
            rho = rk4(|m| lindblad_rhs(&h, k, m), &rho, cfg.dt);
            rho = normalize_checked(&rho)?;
        }
        if next_out < out.len() && out[next_out] == step {
            times.push(step as f64 * cfg.dt);
            states.push(DensityMatrix::from_trusted(rho));
            next_out += 1;
        }
    }
    Ok(StateSeries { times, states })
}

/// Co-integrated Lindblad mean state and nonstochastic filter estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleFilterRun {
    pub times: Vec<f64>,
    /// Ensemble-averaged real state (Lindblad).
    pub rho_r: Vec<DensityMatrix>,
    /// Nonstochastic filter estimate.
    pub rho_e: Vec<DensityMatrix>,
}

struct EnsembleFilterIntegrator<'a> {
    cfg: &'a SimConfig,
    h: CMatrix,
    dephasing: f64,
    t: f64,
    rho_r: CMatrix,
    rho_e: CMatrix,
}

impl<'a> EnsembleFilterIntegrator<'a> {
    fn new(cfg: &'a SimConfig, rho0_r: &DensityMatrix, rho0_e: &DensityMatrix) -> Self {
        EnsembleFilterIntegrator {
            cfg,
            h: cfg.hamiltonian(),
            dephasing: cfg.dephasing_rate(),
            t: 0.0,
            rho_r: *rho0_r.matrix(),
            rho_e: *rho0_e.matrix(),
        }
    }

    fn rhs(&self, r: &CMatrix, e: &CMatrix) -> (CMatrix, CMatrix) {
        (
            lindblad_rhs(&self.h, self.dephasing, r),
            ensemble_filter_rhs(self.cfg, &self.h, e, sz_expectation(r)),
        )
    }

    fn step(&mut self, dt: f64) -> Result<()> {
        let (r, e) = (self.rho_r, self.rho_e);
        let (a1, b1) = self.rhs(&r, &e);
        let (a2, b2) = self.rhs(&(r + a1.scale(0.5 * dt)), &(e + b1.scale(0.5 * dt)));
        let (a3, b3) = self.rhs(&(r + a2.scale(0.5 * dt)), &(e + b2.scale(0.5 * dt)));
        let (a4, b4) = self.rhs(&(r + a3.scale(dt)), &(e + b3.scale(dt)));
        let r = r + (a1 + a2.scale(2.0) + a3.scale(2.0) + a4).scale(dt / 6.0);
        let e = e + (b1 + b2.scale(2.0) + b3.scale(2.0) + b4).scale(dt / 6.0);
        self.t += dt;
        self.rho_r = normalize_checked(&r)?;
        self.rho_e = positivity_checked(&e, self.t)?;
        Ok(())
    }

    /// Steps of at most `cfg.dt`, landing exactly on `target`.
    fn advance_to(&mut self, target: f64) -> Result<()> {
        let span = target - self.t;
        if span <= 0.0 {
            return Ok(());
        }
        let n = (span / self.cfg.dt - 1e-9).ceil().max(1.0) as usize;
        let h = span / n as f64;
        for _ in 0..n {
            self.step(h)?;
        }
        self.t = target;
        Ok(())
    }

    fn snapshot(&self) -> (DensityMatrix, DensityMatrix) {
        (
            DensityMatrix::from_trusted(self.rho_r),
            DensityMatrix::from_trusted(self.rho_e),
        )
    }
}

/// Nonstochastic filter co-integrated with the Lindblad mean, sampled on the
/// configured output grid.
pub fn run_ensemble_filter(
    cfg: &SimConfig,
    rho0_r: &DensityMatrix,
    rho0_e: &DensityMatrix,
) -> Result<EnsembleFilterRun> {
    cfg.validate()?;
    check_qubit(rho0_r)?;
    check_qubit(rho0_e)?;
    let mut integ = EnsembleFilterIntegrator::new(cfg, rho0_r, rho0_e);
    let out = cfg.output_steps();
    let mut run = EnsembleFilterRun {
        times: Vec::with_capacity(out.len()),
        rho_r: Vec::with_capacity(out.len()),
        rho_e: Vec::with_capacity(out.len()),
    };
    let mut next_out = 0;
    for step in 0..=cfg.n_steps {
        if step > 0 {
            integ.step(cfg.dt)?;
        }
        if next_out < out.len() && out[next_out] == step {
            let (r, e) = integ.snapshot();
            run.times.push(step as f64 * cfg.dt);
            run.rho_r.push(r);
            run.rho_e.push(e);
            next_out += 1;
        }
    }
    Ok(run)
}

/// As [`run_ensemble_filter`] but sampled at arbitrary nondecreasing times,
/// using steps no longer than `cfg.dt`.
pub fn run_ensemble_filter_at(
    cfg: &SimConfig,
    rho0_r: &DensityMatrix,
    rho0_e: &DensityMatrix,
    times: &[f64],
) -> Result<EnsembleFilterRun> {
    cfg.validate()?;
    check_qubit(rho0_r)?;
    check_qubit(rho0_e)?;
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::InvalidParameter(
            "sample times must be nonnegative and nondecreasing".into(),
        ));
    }
    let mut integ = EnsembleFilterIntegrator::new(cfg, rho0_r, rho0_e);
    let mut run = EnsembleFilterRun {
        times: Vec::with_capacity(times.len()),
        rho_r: Vec::with_capacity(times.len()),
        rho_e: Vec::with_capacity(times.len()),
    };
    for &t in times {
        integ.advance_to(t)?;
        let (r, e) = integ.snapshot();
        run.times.push(t);
        run.rho_r.push(r);
        run.rho_e.push(e);
    }
    Ok(run)
}

/// One realization with master seed `cfg.seed`, trajectory index 0.
pub fn run_trajectory(
    cfg: &SimConfig,
    rho0_r: &DensityMatrix,
    rho0_e: &DensityMatrix,
) -> Result<TrajectoryRecord> {
    run_trajectory_indexed(cfg, 0, rho0_r, rho0_e)
}

/// Co-evolves the conditioned state (generating the record) and the filter
/// (consuming the same record), step-locked, with noise from stream
/// `index` of the master seed.
pub fn run_trajectory_indexed(
    cfg: &SimConfig,
    index: u64,
    rho0_r: &DensityMatrix,
    rho0_e: &DensityMatrix,
) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    check_qubit(rho0_r)?;
    check_qubit(rho0_e)?;
    let stepper = Stepper::new(cfg);
    let mut noise = WienerStream::new(cfg.seed, index, cfg.dt);
    let out = cfg.output_steps();
    let mut rec = TrajectoryRecord {
        times: Vec::with_capacity(out.len()),
        rho_r: Vec::with_capacity(out.len()),
        rho_e: Vec::with_capacity(out.len()),
        rho_i: Vec::with_capacity(out.len()),
        dy: Vec::with_capacity(out.len()),
    };
    let mut r = *rho0_r.matrix();
    let mut e = *rho0_e.matrix();
    let mut y = 0.0;
    let mut next_out = 0;
    for step in 0..=cfg.n_steps {
        if step > 0 {
            let dy = stepper.record_increment(&r, noise.next_increment());
            let t = step as f64 * cfg.dt;
            r = stepper.update(&r, dy).map_err(|err| at_time(err, t))?;
            e = stepper.update(&e, dy).map_err(|err| at_time(err, t))?;
            y += dy;
        }
        if next_out < out.len() && out[next_out] == step {
            let t = step as f64 * cfg.dt;
            rec.times.push(t);
            rec.rho_r.push(DensityMatrix::from_trusted(r));
            rec.rho_e.push(DensityMatrix::from_trusted(e));
            rec.rho_i.push(ideal_state(cfg, rho0_r, t));
            rec.dy.push(y);
            y = 0.0;
            next_out += 1;
        }
    }
    Ok(rec)
}

fn at_time(err: Error, t: f64) -> Error {
    match err {
        Error::InvalidState(msg) => Error::InvalidState(format!("{msg} (t = {t})")),
        other => other,
    }
}
