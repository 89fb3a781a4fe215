//! Projective apparatus measurements on a system–apparatus pair and the
//! discord lower bound on the entropic confidence.
//!
//! States are 4x4 with tensor order system ⊗ apparatus. A measurement in the
//! apparatus basis `{|0'>, |1'>}` dephases the state into
//! `rho_m = sum_j (I ⊗ P_j) rho (I ⊗ P_j)`, and its confidence
//! `S(rho || rho_m) = S(rho_m) - S(rho)` is bounded below by the discord
//! `min_basis S(rho_m) - S(rho)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::ensemble::install;
use crate::error::{Error, Result};
use crate::qstate::{
    eigvalsh, relative_entropy, sampling::StateSampler, von_neumann_entropy, CMatrix,
    DensityMatrix, EIGEN_FLOOR,
};

/// Tolerance on the agreement of the two entropy routes.
pub const ROUTE_TOL: f64 = 1e-9;

pub const DEFAULT_RESOLUTION: usize = 64;

/// Apparatus basis `|0'> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`,
/// `|1'> = -e^{-i phi} sin(theta/2)|0> + cos(theta/2)|1>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApparatusBasis {
    pub theta: f64,
    pub phi: f64,
}

impl ApparatusBasis {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..TAU).contains(&phi) {
            return Err(Error::InvalidParameter(format!(
                "basis angles out of range: theta = {theta}, phi = {phi}"
            )));
        }
        Ok(ApparatusBasis { theta, phi })
    }

    pub fn computational() -> Self {
        ApparatusBasis { theta: 0.0, phi: 0.0 }
    }

    /// Same projectors for any real angles, mapped to `theta ∈ [0, π]`,
    /// `phi ∈ [0, 2π)`.
    pub fn canonical(theta: f64, phi: f64) -> Self {
        let mut t = theta.rem_euclid(TAU);
        let mut p = phi;
        if t > PI {
            t = TAU - t;
            p += PI;
        }
        let mut p = p.rem_euclid(TAU);
        if p >= TAU {
            p = 0.0;
        }
        ApparatusBasis { theta: t, phi: p }
    }

    /// The two basis vectors.
    pub fn vectors(&self) -> [[Complex64; 2]; 2] {
        vectors(self.theta, self.phi)
    }

    pub fn projectors(&self) -> [CMatrix; 2] {
        let [v0, v1] = self.vectors();
        [CMatrix::outer(&v0, &v0), CMatrix::outer(&v1, &v1)]
    }
}

fn vectors(theta: f64, phi: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (0.5 * theta).sin_cos();
    let e = Complex64::from_polar(1.0, phi);
    [
        [Complex64::new(c, 0.0), e * s],
        [-e.conj() * s, Complex64::new(c, 0.0)],
    ]
}

fn check_bipartite(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(rho.dim(), 4));
    }
    Ok(())
}

/// `sum_j (I ⊗ P_j) rho (I ⊗ P_j)`.
pub fn post_measurement_state(rho: &DensityMatrix, basis: &ApparatusBasis) -> Result<DensityMatrix> {
    check_bipartite(rho)?;
    let id = CMatrix::identity(2);
    let mut out = CMatrix::zeros(4);
    for p in basis.projectors() {
        let q = id.kron(&p);
        out += q * *rho.matrix() * q;
    }
    Ok(DensityMatrix::from_trusted(out.hermitize()))
}

/// Confidence of the apparatus measurement, computed both as
/// `S(rho || rho_m)` and as `S(rho_m) - S(rho)`; the routes must agree
/// within [`ROUTE_TOL`].
pub fn povm_confidence(rho: &DensityMatrix, basis: &ApparatusBasis) -> Result<f64> {
    let rho_m = post_measurement_state(rho, basis)?;
    let relative = relative_entropy(rho, &rho_m)?;
    let difference = von_neumann_entropy(&rho_m)? - von_neumann_entropy(rho)?;
    if !((relative - difference).abs() <= ROUTE_TOL) {
        return Err(Error::RouteDisagreement {
            relative,
            difference,
        });
    }
    Ok(relative.max(0.0))
}

fn h(lambda: f64) -> f64 {
    if lambda > EIGEN_FLOOR {
        -lambda * lambda.ln()
    } else {
        0.0
    }
}

/// `S(rho_m)` from the two conditional system blocks `<j| rho |j>_A`.
fn measured_entropy(rho: &CMatrix, theta: f64, phi: f64) -> f64 {
    let mut s = 0.0;
    for v in vectors(theta, phi) {
        let mut block = CMatrix::zeros(2);
        for a in 0..2 {
            for b in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..2 {
                    for l in 0..2 {
                        acc += v[k].conj() * rho[(2 * a + k, 2 * b + l)] * v[l];
                    }
                }
                block[(a, b)] = acc;
            }
        }
        for lambda in eigvalsh(&block) {
            s += h(lambda);
        }
    }
    s
}

/// Golden-section minimum of `f` on `[a, b]`.
fn golden(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Coordinate descent with golden-section line searches from `(t, p)`,
/// with initial half-widths `(ht, hp)`.
fn refine(rho: &CMatrix, mut t: f64, mut p: f64, mut ht: f64, mut hp: f64) -> (f64, f64, f64) {
    let mut best = measured_entropy(rho, t, p);
    for _ in 0..200 {
        let before = best;
        let (nt, ft) = golden(|x| measured_entropy(rho, x, p), t - ht, t + ht, 1e-12);
        if ft < best {
            t = nt;
            best = ft;
        }
        let (np, fp) = golden(|x| measured_entropy(rho, t, x), p - hp, p + hp, 1e-12);
        if fp < best {
            p = np;
            best = fp;
        }
        if before - best <= 1e-16 {
            if ht < 1e-9 && hp < 1e-9 {
                break;
            }
            ht *= 0.5;
            hp *= 0.5;
        }
    }
    (best, t, p)
}

/// Starting points kept from the grid for refinement.
const REFINE_STARTS: usize = 4;

/// Minimum over apparatus bases of `S(rho_m) - S(rho)`: a `resolution x
/// resolution` grid in `(theta, phi)` followed by golden-section coordinate
/// descent from the best grid points. Returns the minimum and its basis.
pub fn discord_lower_bound(rho: &DensityMatrix, resolution: usize) -> Result<(f64, ApparatusBasis)> {
    check_bipartite(rho)?;
    if resolution < 8 {
        return Err(Error::InvalidParameter(format!(
            "grid resolution must be at least 8, got {resolution}"
        )));
    }
    let m = rho.matrix();
    let s_rho = von_neumann_entropy(rho)?;
    let dt = PI / (resolution - 1) as f64;
    let dp = TAU / resolution as f64;
    let mut grid: Vec<(f64, f64, f64)> = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        let theta = i as f64 * dt;
        for j in 0..resolution {
            let phi = j as f64 * dp;
            grid.push((measured_entropy(m, theta, phi), theta, phi));
        }
    }
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = grid[0];
    for &(_, t, p) in grid.iter().take(REFINE_STARTS) {
        let r = refine(m, t, p, dt, dp);
        if r.0 < best.0 {
            best = r;
        }
    }
    let (s_m, t, p) = best;
    Ok(((s_m - s_rho).max(0.0), ApparatusBasis::canonical(t, p)))
}

/// One line of the bound report.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundRow {
    pub state: usize,
    pub basis: usize,
    pub theta: f64,
    pub phi: f64,
    pub confidence: f64,
    pub discord: f64,
}

impl BoundRow {
    pub fn holds(&self) -> bool {
        self.confidence >= self.discord - ROUTE_TOL
    }
}

/// Random states (seeded sampler) against random bases: every row carries
/// the confidence of one basis and the discord bound of its state.
pub fn bound_report(
    n_states: usize,
    n_bases: usize,
    resolution: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<Vec<BoundRow>> {
    let mut sampler = StateSampler::new(seed);
    let cases: Vec<(DensityMatrix, Vec<(f64, f64)>)> = (0..n_states)
        .map(|_| {
            let rho = sampler.any(4);
            let bases = (0..n_bases).map(|_| sampler.sphere_angles()).collect();
            (rho, bases)
        })
        .collect();
    let per_state: Vec<Result<Vec<BoundRow>>> = install(workers, || {
        cases
            .par_iter()
            .enumerate()
            .map(|(state, (rho, bases))| {
                let (d, _) = discord_lower_bound(rho, resolution)?;
                bases
                    .iter()
                    .enumerate()
                    .map(|(basis, &(theta, phi))| {
                        let c = povm_confidence(rho, &ApparatusBasis::new(theta, phi)?)?;
                        Ok(BoundRow {
                            state,
                            basis,
                            theta,
                            phi,
                            confidence: c,
                            discord: d,
                        })
                    })
                    .collect()
            })
            .collect()
    })?;
    let mut rows = Vec::with_capacity(n_states * n_bases);
    for r in per_state {
        rows.extend(r?);
    }
    Ok(rows)
}
