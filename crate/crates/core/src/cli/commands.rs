use std::path::PathBuf;

use serde::Serialize;

use super::config::{ExperimentConfig, FORMAT_VERSION};
use super::output::*;
use crate::discord::bound_report;
use crate::dynamics::{run_ensemble_filter, run_trajectory};
use crate::ensemble::{run_ensemble_with, EnsembleOptions};
use crate::error::Result;
use crate::goalprog::{crossing_locus, evaluate, surfaces, BestSetSummary};
use crate::metrics::MetricSeries;
use crate::qstate::DensityMatrix;

/// Files written by a command and a one-line summary.
#[derive(Debug)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

fn initial_states() -> Result<(DensityMatrix, DensityMatrix)> {
    Ok((DensityMatrix::left(), DensityMatrix::maximally_mixed(2)?))
}

fn metric_cells(m: &MetricSeries, k: usize) -> [String; 7] {
    let p = m.point(k);
    [
        fmt_num(p.confidence_fid),
        fmt_num(p.backaction_fid),
        fmt_num(1.0 - p.confidence_fid),
        fmt_num(1.0 - p.backaction_fid),
        fmt_num(p.confidence_re),
        fmt_num(p.backaction_re),
        fmt_num(p.epitome_re),
    ]
}

/// Single realization: `trajectory.csv`.
pub fn cmd_trajectory(cfg: &ExperimentConfig) -> Result<Report> {
    let sim = cfg.sim_config()?;
    let (r0, e0) = initial_states()?;
    let rec = run_trajectory(&sim, &r0, &e0)?;
    let m = MetricSeries::from_record(&rec)?;
    let mut csv = Csv::new("trajectory", &cfg.hash()?, cfg.seed, &TRAJECTORY_COLUMNS);
    for k in 0..rec.len() {
        let mut row = vec![
            fmt_num(rec.times[k]),
            fmt_num(rec.rho_r[k].population(0)),
            fmt_num(rec.rho_e[k].population(0)),
            fmt_num(rec.rho_i[k].population(0)),
        ];
        row.extend(metric_cells(&m, k));
        csv.row(&row);
    }
    let path = csv.write(&cfg.out_dir, "trajectory.csv")?;
    Ok(Report {
        summary: format!("trajectory: {} rows -> {}", rec.len(), path.display()),
        files: vec![path],
    })
}

/// Ensemble means, standard errors and metrics of the mean: `ensemble.csv`.
#[allow(clippy::needless_range_loop)]
pub fn cmd_ensemble(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Report> {
    let sim = cfg.sim_config()?;
    let (r0, e0) = initial_states()?;
    let n = cfg.ensemble.realizations;
    let res = run_ensemble_with(&sim, n, &r0, &e0, EnsembleOptions { workers })?;
    let me2 = if cfg.ensemble.compare_me2 {
        Some(run_ensemble_filter(&sim, &r0, &e0)?)
    } else {
        None
    };
    let mut columns: Vec<&str> = TRAJECTORY_COLUMNS.to_vec();
    columns.extend(ENSEMBLE_STDERR_COLUMNS);
    columns.extend(ENSEMBLE_MOM_COLUMNS);
    if me2.is_some() {
        columns.push(ME2_COLUMN);
    }
    let mut csv = Csv::new("ensemble", &cfg.hash()?, cfg.seed, &columns);
    let p_i = res.p_l_ideal();
    let (mean, se, mom) = (&res.metrics_mean, &res.metrics_stderr, &res.metrics_of_mean);
    for k in 0..res.len() {
        let mut row = vec![
            fmt_num(res.times[k]),
            fmt_num(res.p_l_real[k]),
            fmt_num(res.p_l_est[k]),
            fmt_num(p_i[k]),
        ];
        row.extend(metric_cells(mean, k));
        let s = se.point(k);
        row.extend([
            res.p_l_real_stderr[k],
            res.p_l_est_stderr[k],
            s.confidence_fid,
            s.backaction_fid,
            s.confidence_re,
            s.backaction_re,
            s.epitome_re,
        ]
        .map(fmt_num));
        let o = mom.point(k);
        row.extend(
            [o.confidence_fid, o.backaction_fid, o.confidence_re, o.backaction_re, o.epitome_re]
                .map(fmt_num),
        );
        if let Some(run) = &me2 {
            row.push(fmt_num(run.rho_e[k].population(0)));
        }
        csv.row(&row);
    }
    let path = csv.write(&cfg.out_dir, "ensemble.csv")?;
    Ok(Report {
        summary: format!("ensemble: {n} realizations, {} rows -> {}", res.len(), path.display()),
        files: vec![path],
    })
}

/// Confidence, backaction and epitome surfaces (`sweep.csv`) and the
/// per-column crossing locus (`crossing.csv`).
pub fn cmd_sweep(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Report> {
    let s = surfaces(&cfg.t_grid(), &cfg.kappa_grid(), &cfg.sweep_template()?, workers)?;
    let hash = cfg.hash()?;
    let mut csv = Csv::new("sweep", &hash, cfg.seed, &SWEEP_COLUMNS);
    for (k, &kappa) in s.kappa_grid.iter().enumerate() {
        for (j, &t) in s.t_grid.iter().enumerate() {
            csv.row(&[t, kappa, s.c_re[k][j], s.b_re[k][j], s.e_re[k][j]].map(fmt_num));
        }
    }
    let mut cross = Csv::new("crossing", &hash, cfg.seed, &CROSSING_COLUMNS);
    for row in crossing_locus(&s) {
        cross.row(&[fmt_num(row.kappa), fmt_opt(row.t_cross), fmt_opt(row.t_argmin_e)]);
    }
    let files = vec![
        csv.write(&cfg.out_dir, "sweep.csv")?,
        cross.write(&cfg.out_dir, "crossing.csv")?,
    ];
    Ok(Report {
        summary: format!(
            "sweep: {} x {} grid -> {}",
            s.t_grid.len(),
            s.kappa_grid.len(),
            cfg.out_dir.display()
        ),
        files,
    })
}

#[derive(Serialize)]
struct GoalSummary<'a> {
    version: &'a str,
    format_version: u32,
    config_hash: String,
    seed: u64,
    scenarios: Vec<ScenarioSummary<'a>>,
}

#[derive(Serialize)]
struct ScenarioSummary<'a> {
    name: &'a str,
    eta1: f64,
    eta2: f64,
    delta_c: f64,
    delta_b: f64,
    best_set: BestSetSummary,
}

/// Objective and deviation grids per scenario (`goalprog_<name>.csv`) and
/// best-set bounding boxes (`goalprog_summary.json`).
pub fn cmd_goalprog(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Report> {
    let s = surfaces(&cfg.t_grid(), &cfg.kappa_grid(), &cfg.sweep_template()?, workers)?;
    let hash = cfg.hash()?;
    let mut files = Vec::new();
    let mut scenarios = Vec::new();
    for (sc, g) in cfg.goalprog.scenarios.iter().zip(cfg.goal_configs()) {
        let r = evaluate(&s, &g)?;
        let mut csv = Csv::new("goalprog", &hash, cfg.seed, &GOAL_COLUMNS);
        for (k, &kappa) in r.kappa_grid.iter().enumerate() {
            for (j, &t) in r.t_grid.iter().enumerate() {
                csv.row(
                    &[t, kappa, r.objective[k][j], r.d1p[k][j], r.d1m[k][j], r.d2p[k][j], r.d2m[k][j]]
                        .map(fmt_num),
                );
            }
        }
        files.push(csv.write(&cfg.out_dir, &format!("goalprog_{}.csv", sc.name))?);
        scenarios.push(ScenarioSummary {
            name: &sc.name,
            eta1: sc.eta1,
            eta2: sc.eta2,
            delta_c: sc.delta_c,
            delta_b: sc.delta_b,
            best_set: r.summary(),
        });
    }
    let cells: Vec<String> = scenarios
        .iter()
        .map(|s| format!("{}={}", s.name, s.best_set.cells))
        .collect();
    let summary = GoalSummary {
        version: env!("CARGO_PKG_VERSION"),
        format_version: FORMAT_VERSION,
        config_hash: hash,
        seed: cfg.seed,
        scenarios,
    };
    let mut json = serde_json::to_string_pretty(&summary)
        .map_err(|e| crate::Error::Io(e.to_string()))?;
    json.push('\n');
    files.push(write_file(&cfg.out_dir, "goalprog_summary.json", &json)?);
    Ok(Report {
        summary: format!("goalprog: best-set cells {}", cells.join(" ")),
        files,
    })
}

/// Random-state check of the discord bound: `discord.csv`.
pub fn cmd_discord(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Report> {
    let d = &cfg.discord;
    let rows = bound_report(d.states, d.bases, d.resolution, cfg.seed, workers)?;
    let mut csv = Csv::new("discord", &cfg.hash()?, cfg.seed, &DISCORD_COLUMNS);
    let mut violations = 0;
    for r in &rows {
        if !r.holds() {
            violations += 1;
        }
        csv.row(&[
            r.state.to_string(),
            r.basis.to_string(),
            fmt_num(r.theta),
            fmt_num(r.phi),
            fmt_num(r.confidence),
            fmt_num(r.discord),
            u8::from(r.holds()).to_string(),
        ]);
    }
    let path = csv.write(&cfg.out_dir, "discord.csv")?;
    Ok(Report {
        summary: format!(
            "discord: {} cases, {violations} violations -> {}",
            rows.len(),
            path.display()
        ),
        files: vec![path],
    })
}
