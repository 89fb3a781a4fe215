//! Fidelity and entropic distances between density operators. All logarithms
//! are natural, so entropies are in nats.

use super::density::{DensityMatrix, EIGEN_FLOOR, NEGATIVITY_TOL};
use super::eigen::eigvalsh;
use crate::error::{Error, Result};

/// Weight of `sigma` on a floored eigenvector of `rho` above which the
/// relative entropy is reported as infinite.
pub const SUPPORT_TOL: f64 = 1e-9;

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(())
}

fn floored(lambda: f64) -> Result<f64> {
    if lambda < -NEGATIVITY_TOL {
        return Err(Error::InvalidState(format!("negative eigenvalue {lambda:e}")));
    }
    Ok(lambda.max(EIGEN_FLOOR))
}

/// Uhlmann fidelity `F = (Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let root = sigma.eigen().apply(|l| l.max(0.0).sqrt());
    let inner = (root * *rho.matrix() * root).hermitize();
    let trace_norm: f64 = eigvalsh(&inner).iter().map(|l| l.max(0.0).sqrt()).sum();
    Ok((trace_norm * trace_norm).clamp(0.0, 1.0))
}

/// `S(rho) = -sum lambda ln lambda`, with `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let mut s = 0.0;
    for lambda in rho.eigenvalues() {
        let l = floored(lambda)?;
        if l > EIGEN_FLOOR {
            s -= l * l.ln();
        }
    }
    Ok(s.max(0.0))
}

/// `S(sigma || rho) = -Tr sigma ln rho - S(sigma)`.
///
/// Argument order matters. Returns `f64::INFINITY` when `sigma` has weight
/// above [`SUPPORT_TOL`] on an eigenvector of `rho` whose eigenvalue sits at
/// the floor.
pub fn relative_entropy(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    same_dim(sigma, rho)?;
    let eig = rho.eigen();
    let mut cross = 0.0;
    for (k, &lambda) in eig.values.iter().enumerate() {
        let l = floored(lambda)?;
        let weight = sigma.matrix().expectation_in(&eig.vectors.column(k)).re;
        if l <= EIGEN_FLOOR && weight > SUPPORT_TOL {
            return Ok(f64::INFINITY);
        }
        cross -= weight * l.ln();
    }
    let value = cross - von_neumann_entropy(sigma)?;
    // Round-off can leave values a hair below zero.
    Ok(value.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::sampling::StateSampler;
    use crate::qstate::BlochVector;
    use std::f64::consts::LN_2;

    fn mixed2() -> DensityMatrix {
        DensityMatrix::maximally_mixed(2).unwrap()
    }

    /// Closed form for qubits: F = Tr(rho sigma) + 2 sqrt(det rho det sigma).
    fn qubit_fidelity_oracle(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
        let det = |m: &DensityMatrix| {
            (m.entry(0, 0) * m.entry(1, 1) - m.entry(0, 1) * m.entry(1, 0)).re
        };
        let t = a.matrix().trace_product(b.matrix()).re;
        t + 2.0 * (det(a).max(0.0) * det(b).max(0.0)).sqrt()
    }

    #[test]
    fn fidelity_examples() {
        let l = DensityMatrix::left();
        let r = DensityMatrix::right();
        assert!((fidelity(&l, &l).unwrap() - 1.0).abs() < 1e-14);
        assert!(fidelity(&l, &r).unwrap().abs() < 1e-14);
        assert!((fidelity(&l, &mixed2()).unwrap() - 0.5).abs() < 1e-14);
        let bell = DensityMatrix::bell_phi_plus();
        assert!((fidelity(&bell, &bell).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&l, &bell).is_err());
    }

    #[test]
    fn fidelity_matches_qubit_closed_form_and_is_symmetric() {
        let mut s = StateSampler::new(21);
        for _ in 0..500 {
            let a = s.bloch_ball();
            let b = s.bloch_ball();
            let f = fidelity(&a, &b).unwrap();
            assert!((f - qubit_fidelity_oracle(&a, &b)).abs() < 1e-10);
            assert!((f - fidelity(&b, &a).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn entropy_examples() {
        assert!(von_neumann_entropy(&DensityMatrix::left()).unwrap().abs() < 1e-15);
        assert!((von_neumann_entropy(&mixed2()).unwrap() - LN_2).abs() < 1e-14);
        let m4 = DensityMatrix::maximally_mixed(4).unwrap();
        assert!((von_neumann_entropy(&m4).unwrap() - 4f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn relative_entropy_examples() {
        let l = DensityMatrix::left();
        assert_eq!(relative_entropy(&l, &l).unwrap(), 0.0);
        assert!((relative_entropy(&l, &mixed2()).unwrap() - LN_2).abs() < 1e-12);
        assert_eq!(relative_entropy(&mixed2(), &l).unwrap(), f64::INFINITY);
        let mut s = StateSampler::new(2);
        let rho = s.mixed(4);
        assert!(relative_entropy(&rho, &rho).unwrap() < 1e-12);
    }

    #[test]
    fn relative_entropy_is_asymmetric() {
        let a = BlochVector::new(0.0, 0.0, 0.9).unwrap().to_density();
        let b = BlochVector::new(0.0, 0.0, 0.1).unwrap().to_density();
        let ab = relative_entropy(&a, &b).unwrap();
        let ba = relative_entropy(&b, &a).unwrap();
        assert!((ab - ba).abs() > 1e-3);
    }

    #[test]
    fn relative_entropy_diagonal_oracle() {
        // Commuting states reduce to the classical KL divergence.
        let p = [0.7, 0.3];
        let q = [0.2, 0.8];
        let a = DensityMatrix::new(crate::qstate::CMatrix::from_real_diagonal(&p)).unwrap();
        let b = DensityMatrix::new(crate::qstate::CMatrix::from_real_diagonal(&q)).unwrap();
        let kl: f64 = p.iter().zip(q).map(|(pi, qi)| pi * (pi / qi).ln()).sum();
        assert!((relative_entropy(&a, &b).unwrap() - kl).abs() < 1e-14);
    }
}
