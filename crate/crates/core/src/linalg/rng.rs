//! Deterministic pseudo-random number generation.
//!
//! The generator is xoshiro256++ seeded through splitmix64, implemented
//! here rather than taken from a platform library so that identical seeds
//! produce identical sample streams on every platform. Gaussian draws use
//! the Box-Muller transform with a cached spare unit normal.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct Rng {
    state: [u64; 4],
    spare_normal: Option<f64>,
    seed: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let mut state = [0u64; 4];
        for word in &mut state {
            *word = splitmix64(&mut sm);
        }
        if state == [0, 0, 0, 0] {
            state[0] = 1;
        }
        Rng {
            state,
            spare_normal: None,
            seed,
        }
    }

    /// The seed this generator was constructed with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Mixes a purpose tag into a seed so sub-procedures (initialization,
    /// corruption, shuffling, fold assignment) get independent,
    /// independently reproducible streams.
    pub fn derive(seed: u64, tag: u64) -> u64 {
        let mut sm = seed ^ tag.wrapping_mul(GOLDEN);
        splitmix64(&mut sm)
    }

    /// A fresh generator for a tagged sub-purpose of this one's seed.
    pub fn child(&self, tag: u64) -> Rng {
        Rng::new(Self::derive(self.seed, tag))
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform draw in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in [lo, hi). The caller guarantees lo < hi.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal scaled by sigma (Box-Muller).
    pub fn gaussian(&mut self, sigma: f64) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z * sigma;
        }
        // 1 - u keeps the argument of ln strictly positive.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(radius * angle.sin());
        radius * angle.cos() * sigma
    }

    /// Unbiased integer in [0, n) via Lemire's multiply-and-reject method.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "next_below requires n > 0");
        let mut x = self.next_u64();
        let mut m = (x as u128) * (n as u128);
        let mut low = m as u64;
        if low < n {
            let threshold = n.wrapping_neg() % n;
            while low < threshold {
                x = self.next_u64();
                m = (x as u128) * (n as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, values: &mut [T]) {
        for i in (1..values.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            values.swap(i, j);
        }
    }

    /// Matrix of i.i.d. uniform samples in [lo, hi).
    pub fn uniform_matrix(&mut self, rows: usize, cols: usize, lo: f64, hi: f64) -> Result<Matrix> {
        if lo >= hi {
            return Err(Error::Param(format!(
                "uniform bounds require lo < hi, got lo={lo}, hi={hi}"
            )));
        }
        let data = (0..rows * cols).map(|_| self.uniform(lo, hi)).collect();
        Matrix::from_vec(rows, cols, data)
    }

    /// Matrix of i.i.d. N(0, sigma^2) samples.
    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize, sigma: f64) -> Result<Matrix> {
        if sigma < 0.0 {
            return Err(Error::Param(format!(
                "gaussian stddev must be nonnegative, got {sigma}"
            )));
        }
        let data = (0..rows * cols).map(|_| self.gaussian(sigma)).collect();
        Matrix::from_vec(rows, cols, data)
    }
}
