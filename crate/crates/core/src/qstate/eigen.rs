//! Hermitian eigendecomposition: closed form for 2x2, cyclic complex Jacobi
//! otherwise.

use num_complex::Complex64;

use super::matrix::CMatrix;

/// Eigenvalues (ascending) and the unitary whose columns are the matching
/// eigenvectors, so that `A = V diag(values) V^dagger`.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigen {
    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|x| x)
    }

    /// `V diag(f(values)) V^dagger`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.vectors.dim();
        let mapped: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &w) in mapped.iter().enumerate() {
                    acc += self.vectors[(i, k)] * self.vectors[(j, k)].conj() * w;
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }
}

/// Eigendecomposition of a Hermitian matrix. Only the upper triangle and the
/// real part of the diagonal are trusted.
pub fn eigh(a: &CMatrix) -> Eigen {
    match a.dim() {
        1 => Eigen {
            values: vec![a[(0, 0)].re],
            vectors: CMatrix::identity(1),
        },
        2 => eigh2(a),
        _ => jacobi(a),
    }
}

/// Eigenvalues only; for 2x2 this skips the eigenvectors entirely.
pub fn eigvalsh(a: &CMatrix) -> Vec<f64> {
    if a.dim() == 2 {
        let (lo, hi) = eigvals2(a);
        vec![lo, hi]
    } else {
        eigh(a).values
    }
}

#[inline]
fn eigvals2(a: &CMatrix) -> (f64, f64) {
    let p = a[(0, 0)].re;
    let q = a[(1, 1)].re;
    let b = a[(0, 1)];
    let mean = 0.5 * (p + q);
    let half_gap = 0.5 * (p - q);
    let r = half_gap.hypot(b.norm());
    (mean - r, mean + r)
}

fn eigh2(a: &CMatrix) -> Eigen {
    let p = a[(0, 0)].re;
    let q = a[(1, 1)].re;
    let b = a[(0, 1)];
    let (lo, hi) = eigvals2(a);
    let scale = p.abs().max(q.abs()).max(b.norm()).max(f64::MIN_POSITIVE);
    if b.norm() <= 1e-300 || b.norm() <= f64::EPSILON * 1e-3 * scale {
        // Already diagonal.
        let (values, vectors) = if p <= q {
            (vec![p, q], CMatrix::identity(2))
        } else {
            let swap = CMatrix::pauli_x();
            (vec![q, p], swap)
        };
        return Eigen { values, vectors };
    }
    // Two candidate null vectors of (A - lo I); take the better conditioned one.
    let c1 = [b, Complex64::new(lo - p, 0.0)];
    let c2 = [Complex64::new(lo - q, 0.0), b.conj()];
    let n1 = c1[0].norm_sqr() + c1[1].norm_sqr();
    let n2 = c2[0].norm_sqr() + c2[1].norm_sqr();
    let (v, n) = if n1 >= n2 { (c1, n1) } else { (c2, n2) };
    let n = n.sqrt();
    let v0 = v[0] / n;
    let v1 = v[1] / n;
    let vectors = CMatrix::from_row_major(&[v0, -v1.conj(), v1, v0.conj()]).unwrap();
    Eigen {
        values: vec![lo, hi],
        vectors,
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += a[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

fn jacobi(input: &CMatrix) -> Eigen {
    let n = input.dim();
    let mut a = input.hermitize();
    let mut v = CMatrix::identity(n);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        if off_diagonal_norm(&a) <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Unitary acting on the (p, q) plane: phase to a real pivot,
                // then the real symmetric rotation.
                let g_pp = Complex64::new(c, 0.0);
                let g_pq = Complex64::new(s, 0.0);
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;

                // A <- A G  (columns p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                // A <- G^dagger A  (rows p, q)
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                // V <- V G
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, new_col)] = v[(k, old_col)];
        }
    }
    Eigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::sampling::{random_hermitian, StateSampler};

    fn check(a: &CMatrix) {
        let e = eigh(a);
        assert!(
            e.reconstruct().max_abs_diff(a) <= 1e-10,
            "reconstruction failed for {a:?}"
        );
        let vv = e.vectors.adjoint() * e.vectors;
        assert!(vv.max_abs_diff(&CMatrix::identity(a.dim())) <= 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn diagonal_and_degenerate_inputs() {
        check(&CMatrix::from_real_diagonal(&[0.3, 0.7]));
        check(&CMatrix::from_real_diagonal(&[0.7, 0.3]));
        check(&CMatrix::identity(4).scale(0.25));
        check(&CMatrix::from_real_diagonal(&[0.5, 0.0, 0.5, 0.0]));
        let e = eigh(&CMatrix::from_real_diagonal(&[0.9, 0.1, 0.4, 0.2]));
        assert_eq!(e.values, vec![0.1, 0.2, 0.4, 0.9]);
    }

    #[test]
    fn pauli_spectra() {
        for p in [CMatrix::pauli_x(), CMatrix::pauli_y(), CMatrix::pauli_z()] {
            let e = eigh(&p);
            assert!((e.values[0] + 1.0).abs() < 1e-15);
            assert!((e.values[1] - 1.0).abs() < 1e-15);
            check(&p);
        }
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut sampler = StateSampler::new(7);
        for _ in 0..500 {
            check(&random_hermitian(sampler.rng(), 2));
            check(&random_hermitian(sampler.rng(), 4));
            check(sampler.mixed(4).matrix());
            check(sampler.bloch_ball().matrix());
        }
    }

    #[test]
    fn eigvalsh_matches_eigh() {
        let mut sampler = StateSampler::new(3);
        for _ in 0..100 {
            let a = random_hermitian(sampler.rng(), 2);
            let v = eigvalsh(&a);
            let e = eigh(&a);
            assert!((v[0] - e.values[0]).abs() < 1e-14);
            assert!((v[1] - e.values[1]).abs() < 1e-14);
        }
    }
}
