//! Goal programming over measurement scenarios `(t, kappa)`.
//!
//! Minimize `O = eta1 d1+ + eta2 d2+` with `C - d1+ + d1- = Delta_C` and
//! `B - d2+ + d2- = Delta_B`. Confidence and backaction come from the
//! nonstochastic filter co-integrated with the Lindblad mean, one
//! integration per `kappa` column.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{ideal_state, run_ensemble_filter_at, SimConfig};
use crate::ensemble::install;
use crate::error::{Error, Result};
use crate::metrics::{backaction, confidence, epitome, Measure};
use crate::qstate::DensityMatrix;

/// Weights, tolerances (nats) and grids. Times are in Rabi periods, rates in
/// units of the tunnelling frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalConfig {
    pub eta1: f64,
    pub eta2: f64,
    pub delta_c: f64,
    pub delta_b: f64,
    pub t_grid: Vec<f64>,
    pub kappa_grid: Vec<f64>,
}

/// Evenly spaced `n` points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub const DEFAULT_T_RANGE: (f64, f64) = (0.0, 15.0);
pub const DEFAULT_KAPPA_RANGE: (f64, f64) = (0.0005, 0.02);

impl GoalConfig {
    /// Default 100 x 100 grid with the given weights and a common tolerance.
    pub fn new(eta1: f64, eta2: f64, delta: f64) -> Self {
        GoalConfig {
            eta1,
            eta2,
            delta_c: delta,
            delta_b: delta,
            t_grid: linspace(DEFAULT_T_RANGE.0, DEFAULT_T_RANGE.1, 100),
            kappa_grid: linspace(DEFAULT_KAPPA_RANGE.0, DEFAULT_KAPPA_RANGE.1, 100),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eta1", self.eta1),
            ("eta2", self.eta2),
            ("delta_c", self.delta_c),
            ("delta_b", self.delta_b),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        check_grid("t_grid", &self.t_grid, true)?;
        check_grid("kappa_grid", &self.kappa_grid, false)
    }
}

fn check_grid(name: &str, g: &[f64], allow_zero: bool) -> Result<()> {
    if g.is_empty() {
        return Err(Error::InvalidParameter(format!("{name} is empty")));
    }
    if g.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(format!("{name} must be strictly increasing")));
    }
    let lo = g[0];
    if !(lo.is_finite() && g[g.len() - 1].is_finite()) || lo < 0.0 || (!allow_zero && lo == 0.0) {
        return Err(Error::InvalidParameter(format!("{name} has out-of-range values")));
    }
    Ok(())
}

/// `(d+, d-)` with `value - d+ + d- = target`.
pub fn deviations(value: f64, target: f64) -> (f64, f64) {
    ((value - target).max(0.0), (target - value).max(0.0))
}

/// `eta1 max(c - Delta_C, 0) + eta2 max(b - Delta_B, 0)`.
pub fn objective(c: f64, b: f64, g: &GoalConfig) -> f64 {
    g.eta1 * deviations(c, g.delta_c).0 + g.eta2 * deviations(b, g.delta_b).0
}

/// Entropic confidence, backaction and epitome on a `kappa x t` grid,
/// indexed `[kappa][t]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Surfaces {
    pub t_grid: Vec<f64>,
    pub kappa_grid: Vec<f64>,
    pub c_re: Vec<Vec<f64>>,
    pub b_re: Vec<Vec<f64>>,
    pub e_re: Vec<Vec<f64>>,
}

/// Integrates one `kappa` column from `rho_R(0) = |L><L|`, `rho_E(0) = I/2`.
fn column(template: &SimConfig, kappa: f64, t_grid: &[f64]) -> Result<[Vec<f64>; 3]> {
    let cfg = template.with_kappa(kappa);
    cfg.validate()?;
    let l = DensityMatrix::left();
    let mixed = DensityMatrix::maximally_mixed(2)?;
    let times: Vec<f64> = t_grid.iter().map(|t| t * cfg.rabi_period()).collect();
    let run = run_ensemble_filter_at(&cfg, &l, &mixed, &times)?;
    let mut out = [Vec::new(), Vec::new(), Vec::new()];
    for (k, &t) in times.iter().enumerate() {
        let i = ideal_state(&cfg, &l, t);
        let (r, e) = (&run.rho_r[k], &run.rho_e[k]);
        out[0].push(confidence(e, r, Measure::RelativeEntropy)?);
        out[1].push(backaction(&i, r, Measure::RelativeEntropy)?);
        out[2].push(epitome(&i, e, Measure::RelativeEntropy)?);
    }
    Ok(out)
}

/// Surfaces for the given grids (Rabi periods, rate units). `template`
/// supplies the Hamiltonian and step size.
pub fn surfaces(
    t_grid: &[f64],
    kappa_grid: &[f64],
    template: &SimConfig,
    workers: Option<usize>,
) -> Result<Surfaces> {
    check_grid("t_grid", t_grid, true)?;
    check_grid("kappa_grid", kappa_grid, true)?;
    let cols: Vec<Result<[Vec<f64>; 3]>> = install(workers, || {
        kappa_grid
            .par_iter()
            .map(|&k| column(template, k, t_grid))
            .collect()
    })?;
    let mut s = Surfaces {
        t_grid: t_grid.to_vec(),
        kappa_grid: kappa_grid.to_vec(),
        c_re: Vec::with_capacity(kappa_grid.len()),
        b_re: Vec::with_capacity(kappa_grid.len()),
        e_re: Vec::with_capacity(kappa_grid.len()),
    };
    for col in cols {
        let [c, b, e] = col?;
        s.c_re.push(c);
        s.b_re.push(b);
        s.e_re.push(e);
    }
    Ok(s)
}

/// Objective and deviation grids, indexed `[kappa][t]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GoalResult {
    pub t_grid: Vec<f64>,
    pub kappa_grid: Vec<f64>,
    pub objective: Vec<Vec<f64>>,
    pub d1p: Vec<Vec<f64>>,
    pub d1m: Vec<Vec<f64>>,
    pub d2p: Vec<Vec<f64>>,
    pub d2m: Vec<Vec<f64>>,
}

/// Bounding box of the cells with `O = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestSetSummary {
    pub cells: usize,
    pub total_cells: usize,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub kappa_min: Option<f64>,
    pub kappa_max: Option<f64>,
    pub min_objective: f64,
}

impl GoalResult {
    /// Cells `(kappa index, t index)` where the objective vanishes.
    pub fn best_set(&self) -> Vec<(usize, usize)> {
        self.cells_where(|o| o == 0.0)
    }

    /// Cells attaining the minimal objective.
    pub fn argmin_set(&self) -> Vec<(usize, usize)> {
        let min = self.min_objective();
        self.cells_where(|o| o == min)
    }

    pub fn min_objective(&self) -> f64 {
        self.objective
            .iter()
            .flatten()
            .fold(f64::INFINITY, |a, &b| a.min(b))
    }

    fn cells_where(&self, f: impl Fn(f64) -> bool) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (k, row) in self.objective.iter().enumerate() {
            for (j, &o) in row.iter().enumerate() {
                if f(o) {
                    out.push((k, j));
                }
            }
        }
        out
    }

    pub fn summary(&self) -> BestSetSummary {
        let best = self.best_set();
        let ts: Vec<f64> = best.iter().map(|&(_, j)| self.t_grid[j]).collect();
        let ks: Vec<f64> = best.iter().map(|&(k, _)| self.kappa_grid[k]).collect();
        let lo = |v: &[f64]| v.iter().copied().reduce(f64::min);
        let hi = |v: &[f64]| v.iter().copied().reduce(f64::max);
        BestSetSummary {
            cells: best.len(),
            total_cells: self.t_grid.len() * self.kappa_grid.len(),
            t_min: lo(&ts),
            t_max: hi(&ts),
            kappa_min: lo(&ks),
            kappa_max: hi(&ks),
            min_objective: self.min_objective(),
        }
    }
}

/// Evaluates the goal program on precomputed surfaces.
pub fn evaluate(s: &Surfaces, g: &GoalConfig) -> Result<GoalResult> {
    g.validate()?;
    if s.t_grid != g.t_grid || s.kappa_grid != g.kappa_grid {
        return Err(Error::InvalidParameter("surfaces were computed on different grids".into()));
    }
    let shape = |_: ()| vec![vec![0.0; s.t_grid.len()]; s.kappa_grid.len()];
    let mut r = GoalResult {
        t_grid: s.t_grid.clone(),
        kappa_grid: s.kappa_grid.clone(),
        objective: shape(()),
        d1p: shape(()),
        d1m: shape(()),
        d2p: shape(()),
        d2m: shape(()),
    };
    for k in 0..s.kappa_grid.len() {
        for j in 0..s.t_grid.len() {
            let (c, b) = (s.c_re[k][j], s.b_re[k][j]);
            let (p1, m1) = deviations(c, g.delta_c);
            let (p2, m2) = deviations(b, g.delta_b);
            r.d1p[k][j] = p1;
            r.d1m[k][j] = m1;
            r.d2p[k][j] = p2;
            r.d2m[k][j] = m2;
            r.objective[k][j] = objective(c, b, g);
        }
    }
    Ok(r)
}

/// Surfaces plus evaluation.
pub fn sweep(g: &GoalConfig, template: &SimConfig, workers: Option<usize>) -> Result<GoalResult> {
    g.validate()?;
    evaluate(&surfaces(&g.t_grid, &g.kappa_grid, template, workers)?, g)
}

/// First time at which `c` drops to or below `b`, linearly interpolated
/// between samples. `None` if the curves never cross.
pub fn crossing_time(times: &[f64], c: &[f64], b: &[f64]) -> Option<f64> {
    let d: Vec<f64> = c.iter().zip(b).map(|(c, b)| c - b).collect();
    if d.first().is_none_or(|&d0| d0 <= 0.0) {
        return d.first().and_then(|&d0| (d0 <= 0.0).then(|| times[0]));
    }
    for k in 1..d.len() {
        if d[k] <= 0.0 {
            let (d0, d1) = (d[k - 1], d[k]);
            if !(d0.is_finite() && d1.is_finite()) {
                return Some(times[k]);
            }
            let f = d0 / (d0 - d1);
            return Some(times[k - 1] + f * (times[k] - times[k - 1]));
        }
    }
    None
}

/// Time of the smallest value; ties go to the earlier time.
pub fn argmin_time(times: &[f64], values: &[f64]) -> Option<f64> {
    let mut best: Option<(f64, f64)> = None;
    for (&t, &v) in times.iter().zip(values) {
        if best.is_none_or(|(bv, _)| v < bv) {
            best = Some((v, t));
        }
    }
    best.map(|(_, t)| t)
}

/// Per-column crossing of confidence and backaction and the epitome minimum.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossingRow {
    pub kappa: f64,
    pub t_cross: Option<f64>,
    pub t_argmin_e: Option<f64>,
}

pub fn crossing_locus(s: &Surfaces) -> Vec<CrossingRow> {
    (0..s.kappa_grid.len())
        .map(|k| CrossingRow {
            kappa: s.kappa_grid[k],
            t_cross: crossing_time(&s.t_grid, &s.c_re[k], &s.b_re[k]),
            t_argmin_e: argmin_time(&s.t_grid, &s.e_re[k]),
        })
        .collect()
}

/// Default scenario sets: `(label, eta1, eta2, delta)`.
pub const SCENARIOS: [(&str, f64, f64, f64); 4] = [
    ("a", 1.0, 1.0, 0.1),
    ("b", 1.0, 1.0, 0.2),
    ("c", 1.0, 0.5, 0.1),
    ("d", 0.5, 1.0, 0.1),
];

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn template() -> SimConfig {
        SimConfig::for_periods(1.0, 0.005, 15.0, 1000, 10, 0).unwrap()
    }

    fn small(delta: f64) -> GoalConfig {
        GoalConfig {
            t_grid: linspace(0.0, 15.0, 16),
            kappa_grid: linspace(0.002, 0.2, 6),
            ..GoalConfig::new(1.0, 1.0, delta)
        }
    }

    #[test]
    fn deviation_examples() {
        let (p, m) = deviations(0.15, 0.1);
        assert!((p - 0.05).abs() < 1e-15 && m == 0.0);
        let (p, m) = deviations(0.05, 0.1);
        assert!(p == 0.0 && (m - 0.05).abs() < 1e-15);
        assert_eq!(deviations(0.1, 0.1), (0.0, 0.0));
    }

    #[test]
    fn objective_examples() {
        let g = GoalConfig::new(1.0, 0.5, 0.1);
        assert_eq!(objective(0.05, 0.1, &g), 0.0);
        assert!((objective(0.2, 0.3, &g) - 0.2).abs() < 1e-15);
        let g2 = GoalConfig::new(0.5, 1.0, 0.1);
        // Swapped weights favour the other constraint.
        assert!(objective(0.3, 0.1, &g) > objective(0.3, 0.1, &g2));
        assert!(objective(0.1, 0.3, &g) < objective(0.1, 0.3, &g2));
    }

    #[test]
    fn config_validation() {
        assert!(GoalConfig::new(1.0, 1.0, 0.1).validate().is_ok());
        assert!(GoalConfig::new(0.0, 1.0, 0.1).validate().is_err());
        let mut g = GoalConfig::new(1.0, 1.0, 0.1);
        g.t_grid = vec![1.0, 1.0];
        assert!(g.validate().is_err());
        g.t_grid = vec![];
        assert!(g.validate().is_err());
        let mut g = GoalConfig::new(1.0, 1.0, 0.1);
        g.kappa_grid = vec![0.0, 0.1];
        assert!(g.validate().is_err());
    }

    #[test]
    fn crossing_and_argmin() {
        let t = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(crossing_time(&t, &[1.0, 0.6, 0.4, 0.0], &[0.0, 0.2, 0.4, 0.5]), Some(2.0));
        assert_eq!(crossing_time(&t, &[1.0, 0.6, 0.2, 0.0], &[0.0, 0.2, 0.6, 0.5]), Some(1.5));
        assert_eq!(crossing_time(&t, &[1.0; 4], &[0.0; 4]), None);
        assert_eq!(argmin_time(&t, &[3.0, 1.0, 1.0, 2.0]), Some(1.0));
    }

    #[test]
    fn sweep_properties() {
        let s = surfaces(&small(0.1).t_grid, &small(0.1).kappa_grid, &template(), None).unwrap();
        let r1 = evaluate(&s, &small(0.1)).unwrap();
        let r2 = evaluate(&s, &small(0.2)).unwrap();
        let b1 = r1.best_set();
        let b2 = r2.best_set();
        assert!(b1.iter().all(|c| b2.contains(c)));
        for k in 0..r1.kappa_grid.len() {
            for j in 0..r1.t_grid.len() {
                assert_eq!(r1.d1p[k][j] * r1.d1m[k][j], 0.0);
                assert_eq!(r1.d2p[k][j] * r1.d2m[k][j], 0.0);
                assert!(r1.objective[k][j] >= r2.objective[k][j]);
                // Confidence starts at ln 2, backaction at zero.
                if j == 0 {
                    assert!((s.c_re[k][0] - std::f64::consts::LN_2).abs() < 1e-12);
                    assert_eq!(s.b_re[k][0], 0.0);
                }
            }
        }
        let mut doubled = small(0.1);
        doubled.eta1 *= 2.0;
        doubled.eta2 *= 2.0;
        let rd = evaluate(&s, &doubled).unwrap();
        assert_eq!(rd.argmin_set(), r1.argmin_set());
        let mut slack = small(1e9);
        slack.delta_b = 1e9;
        assert!(evaluate(&s, &slack).unwrap().objective.iter().flatten().all(|&o| o == 0.0));
        // Stronger measurement saturates confidence sooner.
        let first_below = |k: usize| s.c_re[k].iter().position(|&c| c < 0.1);
        assert!(first_below(5) < first_below(0) || first_below(0).is_none());
    }

    #[test]
    fn worker_count_does_not_change_surfaces() {
        let g = small(0.1);
        let a = surfaces(&g.t_grid, &g.kappa_grid, &template(), Some(1)).unwrap();
        let b = surfaces(&g.t_grid, &g.kappa_grid, &template(), Some(2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn summary_bounding_box() {
        let g = small(0.2);
        let r = sweep(&g, &template(), None).unwrap();
        let s = r.summary();
        assert_eq!(s.total_cells, 96);
        assert_eq!(s.cells, r.best_set().len());
        if s.cells > 0 {
            assert!(s.t_min.unwrap() <= s.t_max.unwrap());
            assert!(s.kappa_min.unwrap() <= s.kappa_max.unwrap());
            assert_eq!(s.min_objective, 0.0);
        } else {
            assert!(s.t_min.is_none() && s.min_objective > 0.0);
        }
    }

    proptest! {
        #[test]
        fn deviations_are_complementary(v in 0.0f64..5.0, t in 0.0f64..5.0) {
            let (p, m) = deviations(v, t);
            prop_assert!(p >= 0.0 && m >= 0.0);
            prop_assert!(p * m == 0.0);
            prop_assert!((v - p + m - t).abs() <= 1e-12);
        }

        #[test]
        fn objective_monotone_in_tolerances(
            c in 0.0f64..2.0, b in 0.0f64..2.0,
            d in 0.01f64..1.0, extra in 0.0f64..1.0,
            e1 in 0.1f64..3.0, e2 in 0.1f64..3.0,
        ) {
            let g = GoalConfig { eta1: e1, eta2: e2, ..GoalConfig::new(1.0, 1.0, d) };
            let mut looser = g.clone();
            looser.delta_c += extra;
            looser.delta_b += extra;
            prop_assert!(objective(c, b, &looser) <= objective(c, b, &g));
            prop_assert!(objective(c, b, &g) >= 0.0);
            let doubled = GoalConfig { eta1: 2.0 * e1, eta2: 2.0 * e2, ..g.clone() };
            prop_assert_eq!(objective(c, b, &doubled), 2.0 * objective(c, b, &g));
        }
    }
}
