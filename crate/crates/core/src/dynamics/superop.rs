use crate::qstate::CMatrix;

/// `D[a] rho = a rho a^dagger - (a^dagger a rho + rho a^dagger a) / 2`.
pub fn dissipator(a: &CMatrix, rho: &CMatrix) -> CMatrix {
    let ad = a.adjoint();
    let ada = ad * *a;
    *a * *rho * ad - (ada * *rho + *rho * ada).scale(0.5)
}

/// `H[a] rho = a rho + rho a^dagger - Tr(a rho + rho a^dagger) rho`.
pub fn meas_superop(a: &CMatrix, rho: &CMatrix) -> CMatrix {
    let sym = *a * *rho + *rho * a.adjoint();
    let tr = sym.trace();
    sym - rho.scale_complex(tr)
}

/// `-i [H, rho]`.
pub fn hamiltonian_flow(h: &CMatrix, rho: &CMatrix) -> CMatrix {
    h.commutator(rho)
        .scale_complex(num_complex::Complex64::new(0.0, -1.0))
}

/// `<sz> = rho_00 - rho_11`.
#[inline]
pub fn sz_expectation(rho: &CMatrix) -> f64 {
    rho[(0, 0)].re - rho[(1, 1)].re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{sampling::StateSampler, BlochVector, DensityMatrix};

    fn plus() -> CMatrix {
        *BlochVector::new(1.0, 0.0, 0.0).unwrap().to_density().matrix()
    }

    fn minus() -> CMatrix {
        *BlochVector::new(-1.0, 0.0, 0.0).unwrap().to_density().matrix()
    }

    #[test]
    fn dissipator_examples() {
        let sz = CMatrix::pauli_z();
        let mixed = *DensityMatrix::maximally_mixed(2).unwrap().matrix();
        assert!(dissipator(&sz, &mixed).max_abs() < 1e-15);
        assert!(dissipator(&sz, DensityMatrix::left().matrix()).max_abs() < 1e-15);
        let d = dissipator(&sz, &plus());
        assert!(d.max_abs_diff(&(minus() - plus())) < 1e-15);
    }

    #[test]
    fn meas_superop_examples() {
        let sz = CMatrix::pauli_z();
        assert!(meas_superop(&sz, DensityMatrix::left().matrix()).max_abs() < 1e-15);
        let mixed = *DensityMatrix::maximally_mixed(2).unwrap().matrix();
        assert!(meas_superop(&sz, &mixed).max_abs_diff(&sz) < 1e-15);
        assert!(meas_superop(&sz, &plus()).max_abs_diff(&sz) < 1e-15);
    }

    #[test]
    fn superoperators_are_traceless_and_hermitian() {
        let mut s = StateSampler::new(4);
        let ops = [CMatrix::pauli_x(), CMatrix::pauli_y(), CMatrix::pauli_z()];
        for _ in 0..100 {
            let rho = *s.bloch_ball().matrix();
            for a in &ops {
                for out in [dissipator(a, &rho), meas_superop(a, &rho)] {
                    assert!(out.trace().norm() < 1e-14);
                    assert!(out.hermiticity_defect() < 1e-14);
                }
            }
        }
    }
}
