//! Random states for property tests and the discord bound report.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::density::{BlochVector, DensityMatrix};
use super::matrix::CMatrix;

/// Seeded source of random density matrices: uniform in the Bloch ball for
/// qubits, normalized Wishart `G G^dagger / Tr` for any dimension.
pub struct StateSampler {
    rng: ChaCha8Rng,
}

impl StateSampler {
    pub fn new(seed: u64) -> Self {
        StateSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn bloch_ball(&mut self) -> DensityMatrix {
        let dir = gaussian_vector(&mut self.rng, 3);
        let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        let r = self.rng.gen::<f64>().cbrt();
        BlochVector {
            x: r * dir[0] / n,
            y: r * dir[1] / n,
            z: r * dir[2] / n,
        }
        .to_density()
    }

    pub fn mixed(&mut self, dim: usize) -> DensityMatrix {
        let mut g = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                g[(i, j)] = complex_gaussian(&mut self.rng);
            }
        }
        DensityMatrix::normalized(g * g.adjoint()).expect("Wishart sample is positive")
    }

    pub fn pure(&mut self, dim: usize) -> DensityMatrix {
        let v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(&mut self.rng)).collect();
        DensityMatrix::pure(&v).expect("nonzero Gaussian vector")
    }

    /// Alternates between the interior-heavy Wishart ensemble and
    /// boundary-heavy samples (pure states, Bloch-ball qubits).
    pub fn any(&mut self, dim: usize) -> DensityMatrix {
        match (dim, self.rng.gen_range(0..3)) {
            (2, 0) => self.bloch_ball(),
            (_, 1) => self.pure(dim),
            _ => self.mixed(dim),
        }
    }

    /// Uniformly distributed direction on the sphere as `(theta, phi)`.
    pub fn sphere_angles(&mut self) -> (f64, f64) {
        let cos_theta: f64 = self.rng.gen_range(-1.0..=1.0);
        let phi = self.rng.gen_range(0.0..std::f64::consts::TAU);
        (cos_theta.clamp(-1.0, 1.0).acos(), phi)
    }
}

fn gaussian_vector(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Random Hermitian matrix (GUE-like), not normalized.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    (m + m.adjoint()).scale(0.5)
}
