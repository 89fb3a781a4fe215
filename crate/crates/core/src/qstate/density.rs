use num_complex::Complex64;

use super::eigen::{eigh, eigvalsh, Eigen};
use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Hermiticity tolerance for externally supplied matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Allowed trace deviation after construction.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues below this are a hard validity failure.
pub const NEGATIVITY_TOL: f64 = 1e-9;
/// Eigenvalues in `[-NEGATIVITY_TOL, EIGEN_FLOOR]` are clamped to this value
/// before taking logarithms.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// A validated density operator of dimension 2 or 4.
///
/// Construction checks Hermiticity, unit trace and positivity (up to the
/// tolerances above); the value is immutable afterwards.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    /// Validates `m` as is.
    pub fn new(m: CMatrix) -> Result<Self> {
        check_dim(m.dim())?;
        let defect = m.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {defect:e})"
            )));
        }
        let m = m.hermitize();
        let tr = m.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        Self::check_positive(m)
    }

    /// Hermitizes and divides by the trace, then validates.
    pub fn normalized(m: CMatrix) -> Result<Self> {
        check_dim(m.dim())?;
        let h = m.hermitize();
        let tr = h.trace().re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::InvalidState(format!("non-positive trace {tr}")));
        }
        Self::check_positive(h.scale(1.0 / tr))
    }

    fn check_positive(m: CMatrix) -> Result<Self> {
        let min = min_eigenvalue(&m);
        if !min.is_finite() || min < -NEGATIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(DensityMatrix(m))
    }

    /// Skips validation. Callers guarantee the invariants.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        DensityMatrix(m)
    }

    /// The pure state `|psi><psi|`, normalizing `psi`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        check_dim(psi.len())?;
        let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / n).collect();
        Self::normalized(CMatrix::outer(&v, &v))
    }

    /// Basis projector `|k><k|`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        check_dim(dim)?;
        if k >= dim {
            return Err(Error::InvalidParameter(format!("basis index {k} >= {dim}")));
        }
        let mut diag = vec![0.0; dim];
        diag[k] = 1.0;
        Ok(DensityMatrix(CMatrix::from_real_diagonal(&diag)))
    }

    /// `|L><L|`, the left-dot state (first basis vector).
    pub fn left() -> Self {
        Self::basis(2, 0).unwrap()
    }

    /// `|R><R|`, the right-dot state.
    pub fn right() -> Self {
        Self::basis(2, 1).unwrap()
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(DensityMatrix(CMatrix::identity(dim).scale(1.0 / dim as f64)))
    }

    /// `(|00> + |11>) / sqrt(2)`.
    pub fn bell_phi_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let a = Complex64::new(s, 0.0);
        Self::pure(&[a, z, z, a]).unwrap()
    }

    /// `self ⊗ other`, system-major ordering.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        if self.dim() * other.dim() > 4 {
            return Err(Error::UnsupportedDimension(self.dim() * other.dim()));
        }
        Ok(DensityMatrix(self.0.kron(&other.0)))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    /// Population of basis state `k`.
    pub fn population(&self, k: usize) -> f64 {
        self.0[(k, k)].re
    }

    pub fn eigen(&self) -> Eigen {
        eigh(&self.0)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.0)
    }

    /// `Tr(rho A)` for a Hermitian observable `A`.
    pub fn expectation(&self, observable: &CMatrix) -> f64 {
        self.0.trace_product(observable).re
    }

    /// Bloch coordinates; only defined for qubits.
    pub fn bloch(&self) -> Result<BlochVector> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch(self.dim(), 2));
        }
        let off = self.0[(0, 1)];
        Ok(BlochVector {
            x: 2.0 * off.re,
            y: -2.0 * off.im,
            z: self.0[(0, 0)].re - self.0[(1, 1)].re,
        })
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.0.max_abs_diff(&other.0)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

/// Smallest eigenvalue of a Hermitian matrix; closed form for qubits.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    eigvalsh(m)[0]
}

/// Qubit state in Bloch coordinates, `rho = (I + x sx + y sy + z sz) / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let b = BlochVector { x, y, z };
        if !(b.norm() <= 1.0 + 1e-9) {
            return Err(Error::InvalidState(format!(
                "Bloch vector length {} exceeds 1",
                b.norm()
            )));
        }
        Ok(b)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn to_density(&self) -> DensityMatrix {
        let half = 0.5;
        let m = CMatrix::from_row_major(&[
            Complex64::new(half * (1.0 + self.z), 0.0),
            Complex64::new(half * self.x, -half * self.y),
            Complex64::new(half * self.x, half * self.y),
            Complex64::new(half * (1.0 - self.z), 0.0),
        ])
        .unwrap();
        DensityMatrix(m)
    }
}

/// Which half of a two-qubit (system ⊗ apparatus) state to trace out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    System,
    Apparatus,
}

/// Partial trace over `traced` of a 4x4 state ordered system ⊗ apparatus,
/// returning the reduced state of the other half.
pub fn partial_trace(rho: &DensityMatrix, traced: Subsystem) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(rho.dim(), 4));
    }
    let m = rho.matrix();
    let mut out = CMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..2 {
                acc += match traced {
                    Subsystem::Apparatus => m[(2 * i + k, 2 * j + k)],
                    Subsystem::System => m[(2 * k + i, 2 * k + j)],
                };
            }
            out[(i, j)] = acc;
        }
    }
    DensityMatrix::normalized(out)
}

/// `Tr(rho^2)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().trace_product(rho.matrix()).re
}
