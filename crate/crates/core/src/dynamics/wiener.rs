use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

/// 32-bit words of keystream consumed per increment.
const WORDS_PER_DRAW: u128 = 4;

/// Counter-based source of Wiener increments `dW ~ N(0, dt)`.
///
/// Increment `k` of trajectory `j` under master seed `s` is a pure function of
/// `(s, j, k)`: the ChaCha stream is selected by the trajectory index and each
/// increment consumes exactly two 64-bit words, so any increment can be
/// regenerated by seeking. Results do not depend on which thread runs which
/// trajectory.
#[derive(Clone, Debug)]
pub struct WienerStream {
    rng: ChaCha8Rng,
    seed: u64,
    trajectory: u64,
    counter: u64,
    sqrt_dt: f64,
}

impl WienerStream {
    pub fn new(seed: u64, trajectory: u64, dt: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trajectory);
        WienerStream {
            rng,
            seed,
            trajectory,
            counter: 0,
            sqrt_dt: dt.sqrt(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trajectory(&self) -> u64 {
        self.trajectory
    }

    /// Index of the next increment.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Positions the stream so that the next increment is number `counter`.
    pub fn seek(&mut self, counter: u64) {
        self.rng.set_word_pos(counter as u128 * WORDS_PER_DRAW);
        self.counter = counter;
    }

    /// Increment number `counter`, leaving the stream positioned after it.
    pub fn at(&mut self, counter: u64) -> f64 {
        self.seek(counter);
        self.next_increment()
    }

    pub fn next_increment(&mut self) -> f64 {
        self.counter += 1;
        self.sqrt_dt * self.standard_normal()
    }

    /// Box-Muller, cosine branch only, so each draw uses a fixed amount of
    /// keystream.
    fn standard_normal(&mut self) -> f64 {
        let a = self.rng.next_u64();
        let b = self.rng.next_u64();
        // u1 in (0, 1], u2 in [0, 1)
        let u1 = ((a >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = (b >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

impl Iterator for WienerStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_increment())
    }
}
