//! Confidence, backaction and epitome.
//!
//! * confidence: estimate `rho_E` against the real state `rho_R`,
//! * backaction: unmeasured `rho_I` against `rho_R`,
//! * epitome: `rho_I` against `rho_E`.
//!
//! Fidelity variants return the raw distance `1 - F`; the entropy variants
//! return `S(rho_R||rho_E)`, `S(rho_I||rho_R)` and `S(rho_I||rho_E)` in nats,
//! in exactly that argument order (relative entropy is not symmetric).

use serde::{Deserialize, Serialize};

use crate::dynamics::TrajectoryRecord;
use crate::error::{Error, Result};
use crate::qstate::{fidelity, relative_entropy, DensityMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Fidelity,
    RelativeEntropy,
}

fn distance(reference: &DensityMatrix, other: &DensityMatrix, measure: Measure) -> Result<f64> {
    match measure {
        Measure::Fidelity => Ok(1.0 - fidelity(reference, other)?),
        Measure::RelativeEntropy => relative_entropy(reference, other),
    }
}

/// `1 - F(rho_E, rho_R)` or `S(rho_R||rho_E)`.
pub fn confidence(rho_e: &DensityMatrix, rho_r: &DensityMatrix, measure: Measure) -> Result<f64> {
    distance(rho_r, rho_e, measure)
}

/// `1 - F(rho_I, rho_R)` or `S(rho_I||rho_R)`.
pub fn backaction(rho_i: &DensityMatrix, rho_r: &DensityMatrix, measure: Measure) -> Result<f64> {
    distance(rho_i, rho_r, measure)
}

/// `1 - F(rho_I, rho_E)` or `S(rho_I||rho_E)`.
pub fn epitome(rho_i: &DensityMatrix, rho_e: &DensityMatrix, measure: Measure) -> Result<f64> {
    distance(rho_i, rho_e, measure)
}

/// Which entropy-based entries of a point diverge (support violation).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InfinityMask {
    pub confidence: bool,
    pub backaction: bool,
    pub epitome: bool,
}

impl InfinityMask {
    pub fn any(&self) -> bool {
        self.confidence || self.backaction || self.epitome
    }
}

/// All metrics at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricPoint {
    pub confidence_fid: f64,
    pub backaction_fid: f64,
    pub confidence_re: f64,
    pub backaction_re: f64,
    pub epitome_re: f64,
}

impl MetricPoint {
    pub fn evaluate(
        rho_r: &DensityMatrix,
        rho_e: &DensityMatrix,
        rho_i: &DensityMatrix,
    ) -> Result<Self> {
        Ok(MetricPoint {
            confidence_fid: confidence(rho_e, rho_r, Measure::Fidelity)?,
            backaction_fid: backaction(rho_i, rho_r, Measure::Fidelity)?,
            confidence_re: confidence(rho_e, rho_r, Measure::RelativeEntropy)?,
            backaction_re: backaction(rho_i, rho_r, Measure::RelativeEntropy)?,
            epitome_re: epitome(rho_i, rho_e, Measure::RelativeEntropy)?,
        })
    }

    pub(crate) fn to_array(self) -> [f64; 5] {
        [
            self.confidence_fid,
            self.backaction_fid,
            self.confidence_re,
            self.backaction_re,
            self.epitome_re,
        ]
    }

    pub(crate) fn from_array(a: [f64; 5]) -> Self {
        MetricPoint {
            confidence_fid: a[0],
            backaction_fid: a[1],
            confidence_re: a[2],
            backaction_re: a[3],
            epitome_re: a[4],
        }
    }
}

/// Metric time series. Fidelity entries are raw `1 - F`; divergent entropy
/// entries hold `f64::INFINITY` and are flagged in `infinite`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricSeries {
    pub times: Vec<f64>,
    pub confidence_fid: Vec<f64>,
    pub backaction_fid: Vec<f64>,
    pub confidence_re: Vec<f64>,
    pub backaction_re: Vec<f64>,
    pub epitome_re: Vec<f64>,
    pub infinite: Vec<InfinityMask>,
}

impl MetricSeries {
    pub fn with_capacity(n: usize) -> Self {
        MetricSeries {
            times: Vec::with_capacity(n),
            confidence_fid: Vec::with_capacity(n),
            backaction_fid: Vec::with_capacity(n),
            confidence_re: Vec::with_capacity(n),
            backaction_re: Vec::with_capacity(n),
            epitome_re: Vec::with_capacity(n),
            infinite: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push(&mut self, t: f64, p: MetricPoint) {
        self.times.push(t);
        self.confidence_fid.push(p.confidence_fid);
        self.backaction_fid.push(p.backaction_fid);
        self.confidence_re.push(p.confidence_re);
        self.backaction_re.push(p.backaction_re);
        self.epitome_re.push(p.epitome_re);
        self.infinite.push(InfinityMask {
            confidence: p.confidence_re.is_infinite(),
            backaction: p.backaction_re.is_infinite(),
            epitome: p.epitome_re.is_infinite(),
        });
    }

    pub fn point(&self, i: usize) -> MetricPoint {
        MetricPoint {
            confidence_fid: self.confidence_fid[i],
            backaction_fid: self.backaction_fid[i],
            confidence_re: self.confidence_re[i],
            backaction_re: self.backaction_re[i],
            epitome_re: self.epitome_re[i],
        }
    }

    /// Metrics of co-evolved state series.
    pub fn from_states(
        times: &[f64],
        rho_r: &[DensityMatrix],
        rho_e: &[DensityMatrix],
        rho_i: &[DensityMatrix],
    ) -> Result<Self> {
        let n = times.len();
        for len in [rho_r.len(), rho_e.len(), rho_i.len()] {
            if len != n {
                return Err(Error::DimensionMismatch(len, n));
            }
        }
        let mut out = MetricSeries::with_capacity(n);
        for k in 0..n {
            out.push(times[k], MetricPoint::evaluate(&rho_r[k], &rho_e[k], &rho_i[k])?);
        }
        Ok(out)
    }

    pub fn from_record(rec: &TrajectoryRecord) -> Result<Self> {
        Self::from_states(&rec.times, &rec.rho_r, &rec.rho_e, &rec.rho_i)
    }
}

/// Means of `values` over consecutive windows `[k period, (k+1) period)`.
/// A trailing window with fewer samples than its predecessor is dropped.
pub fn period_means(times: &[f64], values: &[f64], period: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let (mut sum, mut count, mut window, mut prev_count) = (0.0, 0usize, 0usize, 0usize);
    for (&t, &v) in times.iter().zip(values) {
        let w = (t / period + 1e-9).floor() as usize;
        if w != window {
            if count > 0 {
                out.push(sum / count as f64);
                prev_count = count;
            }
            sum = 0.0;
            count = 0;
            window = w;
        }
        sum += v;
        count += 1;
    }
    if count > 0 && count >= prev_count {
        out.push(sum / count as f64);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{run_trajectory, SimConfig};
    use crate::qstate::sampling::StateSampler;
    use std::f64::consts::LN_2;

    fn mixed() -> DensityMatrix {
        DensityMatrix::maximally_mixed(2).unwrap()
    }

    #[test]
    fn coincident_states_are_at_zero_distance() {
        let mut s = StateSampler::new(3);
        for _ in 0..50 {
            let rho = s.bloch_ball();
            for m in [Measure::Fidelity, Measure::RelativeEntropy] {
                assert!(confidence(&rho, &rho, m).unwrap().abs() < 1e-9);
                assert!(backaction(&rho, &rho, m).unwrap().abs() < 1e-9);
                assert!(epitome(&rho, &rho, m).unwrap().abs() < 1e-9);
            }
        }
    }

    #[test]
    fn standard_initial_values() {
        let l = DensityMatrix::left();
        let e = mixed();
        assert!((confidence(&e, &l, Measure::Fidelity).unwrap() - 0.5).abs() < 1e-12);
        assert!((confidence(&e, &l, Measure::RelativeEntropy).unwrap() - LN_2).abs() < 1e-12);
        assert!((epitome(&l, &e, Measure::RelativeEntropy).unwrap() - LN_2).abs() < 1e-12);
        assert!((epitome(&l, &e, Measure::Fidelity).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(backaction(&l, &l, Measure::RelativeEntropy).unwrap(), 0.0);
    }

    #[test]
    fn orderings_are_not_symmetric() {
        let l = DensityMatrix::left();
        // S(I/2 || |L><L|) diverges while S(|L><L| || I/2) = ln 2.
        assert!(confidence(&l, &mixed(), Measure::RelativeEntropy)
            .unwrap()
            .is_infinite());
        assert!(backaction(&mixed(), &l, Measure::RelativeEntropy)
            .unwrap()
            .is_infinite());
        assert!(backaction(&l, &mixed(), Measure::RelativeEntropy)
            .unwrap()
            .is_finite());
    }

    #[test]
    fn metrics_are_nonnegative_and_rank_consistently() {
        let mut s = StateSampler::new(11);
        for _ in 0..200 {
            let (a, b) = (s.any(2), s.any(2));
            let f = confidence(&a, &b, Measure::Fidelity).unwrap();
            let r = confidence(&a, &b, Measure::RelativeEntropy).unwrap();
            assert!(f >= 0.0 && r >= 0.0);
            assert_eq!(f > 1e-9, r > 1e-9);
        }
    }

    #[test]
    fn series_flags_infinities() {
        let l = DensityMatrix::left();
        let r = DensityMatrix::right();
        let s = MetricSeries::from_states(&[0.0, 1.0], &[l, r], &[mixed(), mixed()], &[l, l])
            .unwrap();
        assert!(!s.infinite[0].any());
        assert!(s.infinite[1].backaction);
        assert!(!s.infinite[1].confidence && !s.infinite[1].epitome);
        assert!(s.backaction_re[1].is_infinite());
        assert!(MetricSeries::from_states(&[0.0], &[l, l], &[l], &[l]).is_err());
    }

    #[test]
    fn unmeasured_trajectory_has_no_backaction() {
        let cfg = SimConfig::for_periods(1.0, 0.0, 2.0, 2000, 50, 3).unwrap();
        let rec = run_trajectory(&cfg, &DensityMatrix::left(), &mixed()).unwrap();
        let m = MetricSeries::from_record(&rec).unwrap();
        assert_eq!(m.backaction_re[0], 0.0);
        assert!(m.backaction_re.iter().all(|&b| b <= 1e-8));
        assert!(m.backaction_fid.iter().all(|&b| b <= 1e-8));
        // The estimate never learns anything: confidence stays at ln 2.
        assert!(m.confidence_re.iter().all(|&c| (c - LN_2).abs() < 1e-8));
    }

    #[test]
    fn period_means_windows() {
        let times: Vec<f64> = (0..10).map(|k| k as f64 * 0.5).collect();
        let values: Vec<f64> = (0..10).map(|k| k as f64).collect();
        assert_eq!(period_means(&times, &values, 1.0), vec![0.5, 2.5, 4.5, 6.5, 8.5]);
        let times: Vec<f64> = (0..=10).map(|k| k as f64 * 0.5).collect();
        let values: Vec<f64> = (0..=10).map(|k| k as f64).collect();
        assert_eq!(period_means(&times, &values, 1.0).len(), 5);
    }
}
