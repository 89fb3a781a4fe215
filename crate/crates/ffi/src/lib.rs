//! C ABI over the `qfilter` core.
//!
//! Conventions:
//! * every fallible function returns a [`QfStatus`]; on failure a message is
//!   available from [`qf_last_error`] on the same thread,
//! * results are written through caller-provided out-pointers,
//! * objects are opaque handles created by `*_new`/`*_run` and released by
//!   the matching `*_free` (passing NULL to `*_free` is a no-op),
//! * matrices are passed as separate row-major real and imaginary arrays.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use qfilter::detector::{DetectorModel, QpcParams};
use qfilter::discord::discord_lower_bound;
use qfilter::dynamics::{run_trajectory, SimConfig};
use qfilter::metrics::MetricSeries;
use qfilter::qstate::{fidelity, purity, relative_entropy, von_neumann_entropy, CMatrix, DensityMatrix};
use qfilter::Error;

/// Status codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidState = 3,
    Numerical = 4,
    OutOfRange = 5,
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QfStatus {
    match e {
        Error::InvalidState(_) | Error::DimensionMismatch(..) | Error::UnsupportedDimension(_) => {
            QfStatus::InvalidState
        }
        e if e.is_numerical() => QfStatus::Numerical,
        _ => QfStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (QfStatus, String)>) -> QfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QfStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            QfStatus::Panic
        }
    }
}

fn core(e: Error) -> (QfStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (QfStatus, String) {
    (QfStatus::NullPointer, format!("{name} is NULL"))
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, (QfStatus, String)> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write<T>(p: *mut T, name: &str, v: T) -> Result<(), (QfStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    p.write(v);
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len` bytes). Returns the full message length, or 0 if none.
#[no_mangle]
pub unsafe extern "C" fn qf_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

// ---- density matrices -------------------------------------------------------

/// Opaque density matrix (dimension 2 or 4).
pub struct QfDensity(DensityMatrix);

/// Validates and wraps a `dim x dim` row-major matrix.
#[no_mangle]
pub unsafe extern "C" fn qf_density_new(
    re: *const f64,
    im: *const f64,
    dim: usize,
    out: *mut *mut QfDensity,
) -> QfStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        if dim != 2 && dim != 4 {
            return Err((QfStatus::InvalidArgument, format!("unsupported dimension {dim}")));
        }
        let n = dim * dim;
        let re = std::slice::from_raw_parts(re, n);
        let im = std::slice::from_raw_parts(im, n);
        let entries: Vec<Complex64> = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let m = CMatrix::from_row_major(&entries)
            .ok_or_else(|| (QfStatus::InvalidArgument, "bad matrix shape".to_string()))?;
        let rho = DensityMatrix::new(m).map_err(core)?;
        *out = Box::into_raw(Box::new(QfDensity(rho)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qf_density_free(rho: *mut QfDensity) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

#[no_mangle]
pub unsafe extern "C" fn qf_density_dim(rho: *const QfDensity) -> usize {
    rho.as_ref().map_or(0, |r| r.0.dim())
}

/// Uhlmann fidelity in `[0, 1]`.
#[no_mangle]
pub unsafe extern "C" fn qf_fidelity(a: *const QfDensity, b: *const QfDensity, out: *mut f64) -> QfStatus {
    guard(|| {
        let v = fidelity(&deref(a, "a")?.0, &deref(b, "b")?.0).map_err(core)?;
        write(out, "out", v)
    })
}

/// `S(sigma || rho)` in nats; writes `+inf` on a support violation.
#[no_mangle]
pub unsafe extern "C" fn qf_relative_entropy(
    sigma: *const QfDensity,
    rho: *const QfDensity,
    out: *mut f64,
) -> QfStatus {
    guard(|| {
        let v = relative_entropy(&deref(sigma, "sigma")?.0, &deref(rho, "rho")?.0).map_err(core)?;
        write(out, "out", v)
    })
}

#[no_mangle]
pub unsafe extern "C" fn qf_entropy(rho: *const QfDensity, out: *mut f64) -> QfStatus {
    guard(|| {
        let v = von_neumann_entropy(&deref(rho, "rho")?.0).map_err(core)?;
        write(out, "out", v)
    })
}

#[no_mangle]
pub unsafe extern "C" fn qf_purity(rho: *const QfDensity, out: *mut f64) -> QfStatus {
    guard(|| write(out, "out", purity(&deref(rho, "rho")?.0)))
}

// ---- detector -----------------------------------------------------------------

/// Point-contact parameters (reduced units).
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct QfQpcParams {
    pub transparency: f64,
    pub delta_transparency: f64,
    pub bias_voltage: f64,
    pub temperature: f64,
    /// Resistance quantum; zero selects the reduced-unit default `2 pi`.
    pub klitzing_constant: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct QfDetectorModel {
    pub kappa: f64,
    pub delta_current: f64,
    pub noise_floor: f64,
    pub mean_current: f64,
    /// `sqrt(8 kappa)`.
    pub record_gain: f64,
}

#[no_mangle]
pub unsafe extern "C" fn qf_detector_model(params: QfQpcParams, out: *mut QfDetectorModel) -> QfStatus {
    guard(|| {
        let mut p = QpcParams::new(
            params.transparency,
            params.delta_transparency,
            params.bias_voltage,
            params.temperature,
        )
        .map_err(core)?;
        if params.klitzing_constant != 0.0 {
            p.klitzing_constant = params.klitzing_constant;
            p.validate().map_err(core)?;
        }
        let m = DetectorModel::from_params(&p).map_err(core)?;
        write(
            out,
            "out",
            QfDetectorModel {
                kappa: m.kappa,
                delta_current: m.delta_current,
                noise_floor: m.noise_floor,
                mean_current: m.mean_current,
                record_gain: m.record_gain(),
            },
        )
    })
}

// ---- trajectories ---------------------------------------------------------------

/// Scenario for [`qf_trajectory_run`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct QfSimConfig {
    pub omega: f64,
    pub epsilon: f64,
    pub kappa: f64,
    /// Horizon in Rabi periods.
    pub periods: f64,
    pub steps_per_period: usize,
    /// Output samples after `t = 0`.
    pub output_points: usize,
    pub seed: u64,
}

/// One output row. Fidelity metrics are raw `1 - F`; divergent entropies
/// are `+inf`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QfTrajectoryRow {
    pub t: f64,
    pub p_l_real: f64,
    pub p_l_est: f64,
    pub p_l_ideal: f64,
    pub c_fid: f64,
    pub b_fid: f64,
    pub c_re: f64,
    pub b_re: f64,
    pub e_re: f64,
}

/// Opaque single-realization result.
pub struct QfTrajectory(Vec<QfTrajectoryRow>);

/// Runs one realization from the left-dot state with the estimate started at
/// the maximally mixed state.
#[no_mangle]
pub unsafe extern "C" fn qf_trajectory_run(cfg: *const QfSimConfig, out: *mut *mut QfTrajectory) -> QfStatus {
    guard(|| {
        let c = deref(cfg, "cfg")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mut sim = SimConfig::for_periods(
            c.omega,
            c.kappa,
            c.periods,
            c.steps_per_period,
            c.output_points,
            c.seed,
        )
        .map_err(core)?;
        sim.epsilon = c.epsilon;
        let l = DensityMatrix::left();
        let mixed = DensityMatrix::maximally_mixed(2).map_err(core)?;
        let rec = run_trajectory(&sim, &l, &mixed).map_err(core)?;
        let m = MetricSeries::from_record(&rec).map_err(core)?;
        let rows = (0..rec.len())
            .map(|k| QfTrajectoryRow {
                t: rec.times[k],
                p_l_real: rec.rho_r[k].population(0),
                p_l_est: rec.rho_e[k].population(0),
                p_l_ideal: rec.rho_i[k].population(0),
                c_fid: m.confidence_fid[k],
                b_fid: m.backaction_fid[k],
                c_re: m.confidence_re[k],
                b_re: m.backaction_re[k],
                e_re: m.epitome_re[k],
            })
            .collect();
        *out = Box::into_raw(Box::new(QfTrajectory(rows)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qf_trajectory_len(traj: *const QfTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn qf_trajectory_row(
    traj: *const QfTrajectory,
    index: usize,
    out: *mut QfTrajectoryRow,
) -> QfStatus {
    guard(|| {
        let t = deref(traj, "traj")?;
        let row = *t.0.get(index).ok_or_else(|| {
            (
                QfStatus::OutOfRange,
                format!("row {index} out of range (len {})", t.0.len()),
            )
        })?;
        write(out, "out", row)
    })
}

#[no_mangle]
pub unsafe extern "C" fn qf_trajectory_free(traj: *mut QfTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

// ---- discord ---------------------------------------------------------------------

/// Discord lower bound of a 4x4 system ⊗ apparatus state; the minimizing
/// basis angles are written to `theta`/`phi` when non-NULL.
#[no_mangle]
pub unsafe extern "C" fn qf_discord_lower_bound(
    rho: *const QfDensity,
    resolution: usize,
    discord: *mut f64,
    theta: *mut f64,
    phi: *mut f64,
) -> QfStatus {
    guard(|| {
        let (d, basis) = discord_lower_bound(&deref(rho, "rho")?.0, resolution).map_err(core)?;
        write(discord, "discord", d)?;
        if !theta.is_null() {
            *theta = basis.theta;
        }
        if !phi.is_null() {
            *phi = basis.phi;
        }
        Ok(())
    })
}
