//! Dense Hermitian algebra for density operators and the distance measures
//! built on it.

mod density;
mod eigen;
mod matrix;
mod measures;
pub mod sampling;

pub use density::{
    min_eigenvalue, partial_trace, purity, BlochVector, DensityMatrix, Subsystem, EIGEN_FLOOR,
    HERMITIAN_TOL, NEGATIVITY_TOL, TRACE_TOL,
};
pub use eigen::{eigh, eigvalsh, Eigen};
pub use matrix::{CMatrix, MAX_DIM};
pub use measures::{fidelity, relative_entropy, von_neumann_entropy, SUPPORT_TOL};
