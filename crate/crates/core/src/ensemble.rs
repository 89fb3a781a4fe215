//! Many-realization averages of trajectories, states and metrics.
//!
//! Trajectories are simulated in parallel in fixed-size blocks, but their
//! contributions are folded into the accumulators strictly in trajectory-index
//! order, so results are bitwise identical for any worker count.

use rayon::prelude::*;

use crate::dynamics::{ideal_state, run_trajectory_indexed, SimConfig};
use crate::error::{Error, Result};
use crate::metrics::{MetricPoint, MetricSeries};
use crate::qstate::{BlochVector, DensityMatrix};

/// Trajectories simulated concurrently before each in-order fold.
const BLOCK: usize = 32;

/// Execution knobs that never change results.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnsembleOptions {
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

/// Running mean and variance (Welford).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        if x.is_infinite() || self.mean.is_infinite() {
            self.mean = if x.is_infinite() { x } else { self.mean };
            self.m2 = f64::INFINITY;
            return;
        }
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance (zero for a single sample).
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

/// Per-output-point summary of one trajectory.
#[derive(Clone, Copy, Debug)]
struct Sample {
    bloch_r: [f64; 3],
    bloch_e: [f64; 3],
    /// `P_L` of the real state and of the estimate.
    p_l: [f64; 2],
    metrics: [f64; 5],
}

#[derive(Clone, Copy, Debug, Default)]
struct PointAccumulator {
    bloch_r: [Welford; 3],
    bloch_e: [Welford; 3],
    p_l: [Welford; 2],
    metrics: [Welford; 5],
}

impl PointAccumulator {
    fn push(&mut self, s: &Sample) {
        for k in 0..3 {
            self.bloch_r[k].push(s.bloch_r[k]);
            self.bloch_e[k].push(s.bloch_e[k]);
        }
        for k in 0..2 {
            self.p_l[k].push(s.p_l[k]);
        }
        for k in 0..5 {
            self.metrics[k].push(s.metrics[k]);
        }
    }
}

/// Ensemble averages on the output grid.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleResult {
    pub n_realizations: usize,
    pub times: Vec<f64>,
    /// Entrywise means of the conditioned states (renormalized).
    pub mean_rho_r: Vec<DensityMatrix>,
    /// Entrywise means of the filter estimates (renormalized).
    pub mean_rho_e: Vec<DensityMatrix>,
    /// Unmeasured reference (common to all realizations).
    pub rho_i: Vec<DensityMatrix>,
    /// Standard errors of the Bloch components of the mean states.
    pub bloch_stderr_r: Vec<[f64; 3]>,
    pub bloch_stderr_e: Vec<[f64; 3]>,
    /// Left-dot populations averaged across realizations, with standard errors.
    pub p_l_real: Vec<f64>,
    pub p_l_est: Vec<f64>,
    pub p_l_real_stderr: Vec<f64>,
    pub p_l_est_stderr: Vec<f64>,
    /// Per-realization metrics averaged across realizations.
    pub metrics_mean: MetricSeries,
    pub metrics_stderr: MetricSeries,
    /// Metrics of the averaged states.
    pub metrics_of_mean: MetricSeries,
}

impl EnsembleResult {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn p_l_ideal(&self) -> Vec<f64> {
        self.rho_i.iter().map(|s| s.population(0)).collect()
    }
}

/// Metric series with error bars.
#[derive(Clone, Debug, PartialEq)]
pub struct AveragedMetrics {
    pub mean: MetricSeries,
    pub stderr: MetricSeries,
}

/// Mean-of-metric series with standard errors.
pub fn averaged_metrics(result: &EnsembleResult) -> AveragedMetrics {
    AveragedMetrics {
        mean: result.metrics_mean.clone(),
        stderr: result.metrics_stderr.clone(),
    }
}

fn bloch_array(rho: &DensityMatrix) -> Result<[f64; 3]> {
    let b = rho.bloch()?;
    Ok([b.x, b.y, b.z])
}

fn simulate(
    cfg: &SimConfig,
    index: u64,
    rho0_r: &DensityMatrix,
    rho0_e: &DensityMatrix,
) -> Result<Vec<Sample>> {
    let rec = run_trajectory_indexed(cfg, index, rho0_r, rho0_e)?;
    let mut out = Vec::with_capacity(rec.len());
    for k in 0..rec.len() {
        let m = MetricPoint::evaluate(&rec.rho_r[k], &rec.rho_e[k], &rec.rho_i[k])?;
        out.push(Sample {
            bloch_r: bloch_array(&rec.rho_r[k])?,
            bloch_e: bloch_array(&rec.rho_e[k])?,
            p_l: [rec.rho_r[k].population(0), rec.rho_e[k].population(0)],
            metrics: m.to_array(),
        });
    }
    Ok(out)
}

/// Runs `n` realizations (trajectory indices `0..n` of `cfg.seed`).
pub fn run_ensemble(
    cfg: &SimConfig,
    n: usize,
    rho0_r: &DensityMatrix,
    rho0_e: &DensityMatrix,
) -> Result<EnsembleResult> {
    run_ensemble_with(cfg, n, rho0_r, rho0_e, EnsembleOptions::default())
}

pub fn run_ensemble_with(
    cfg: &SimConfig,
    n: usize,
    rho0_r: &DensityMatrix,
    rho0_e: &DensityMatrix,
    opts: EnsembleOptions,
) -> Result<EnsembleResult> {
    if n == 0 {
        return Err(Error::InvalidParameter("ensemble size must be at least 1".into()));
    }
    cfg.validate()?;
    install(opts.workers, || run_blocks(cfg, n, rho0_r, rho0_e))?
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool.
pub(crate) fn install<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn run_blocks(
    cfg: &SimConfig,
    n: usize,
    rho0_r: &DensityMatrix,
    rho0_e: &DensityMatrix,
) -> Result<EnsembleResult> {
    let times = cfg.output_times();
    let mut acc = vec![PointAccumulator::default(); times.len()];
    let mut start = 0;
    while start < n {
        let end = (start + BLOCK).min(n);
        let block: Vec<Result<Vec<Sample>>> = (start..end)
            .into_par_iter()
            .map(|i| simulate(cfg, i as u64, rho0_r, rho0_e))
            .collect();
        for (offset, samples) in block.into_iter().enumerate() {
            let samples = samples.map_err(|e| Error::Trajectory {
                index: (start + offset) as u64,
                source: Box::new(e),
            })?;
            for (a, s) in acc.iter_mut().zip(&samples) {
                a.push(s);
            }
        }
        start = end;
    }
    finish(cfg, n, times, &acc, rho0_r)
}

fn mean_state(w: &[Welford; 3]) -> Result<DensityMatrix> {
    let (x, y, z) = (w[0].mean(), w[1].mean(), w[2].mean());
    let norm = (x * x + y * y + z * z).sqrt();
    // Averages of unit vectors can exceed the ball only by rounding.
    let s = if norm > 1.0 { 1.0 / norm } else { 1.0 };
    Ok(BlochVector::new(x * s, y * s, z * s)?.to_density())
}

fn finish(
    cfg: &SimConfig,
    n: usize,
    times: Vec<f64>,
    acc: &[PointAccumulator],
    rho0_r: &DensityMatrix,
) -> Result<EnsembleResult> {
    let len = times.len();
    let mut res = EnsembleResult {
        n_realizations: n,
        times: times.clone(),
        mean_rho_r: Vec::with_capacity(len),
        mean_rho_e: Vec::with_capacity(len),
        rho_i: Vec::with_capacity(len),
        bloch_stderr_r: Vec::with_capacity(len),
        bloch_stderr_e: Vec::with_capacity(len),
        p_l_real: Vec::with_capacity(len),
        p_l_est: Vec::with_capacity(len),
        p_l_real_stderr: Vec::with_capacity(len),
        p_l_est_stderr: Vec::with_capacity(len),
        metrics_mean: MetricSeries::with_capacity(len),
        metrics_stderr: MetricSeries::with_capacity(len),
        metrics_of_mean: MetricSeries::with_capacity(len),
    };
    for (k, a) in acc.iter().enumerate() {
        let t = times[k];
        let r = mean_state(&a.bloch_r)?;
        let e = mean_state(&a.bloch_e)?;
        let i = ideal_state(cfg, rho0_r, t);
        res.metrics_of_mean.push(t, MetricPoint::evaluate(&r, &e, &i)?);
        res.mean_rho_r.push(r);
        res.mean_rho_e.push(e);
        res.rho_i.push(i);
        res.bloch_stderr_r.push(a.bloch_r.map(|w| w.stderr()));
        res.bloch_stderr_e.push(a.bloch_e.map(|w| w.stderr()));
        res.p_l_real.push(a.p_l[0].mean());
        res.p_l_est.push(a.p_l[1].mean());
        res.p_l_real_stderr.push(a.p_l[0].stderr());
        res.p_l_est_stderr.push(a.p_l[1].stderr());
        res.metrics_mean.push(t, MetricPoint::from_array(a.metrics.map(|w| w.mean())));
        res.metrics_stderr.push(t, MetricPoint::from_array(a.metrics.map(|w| w.stderr())));
    }
    Ok(res)
}
