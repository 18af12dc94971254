use std::f64::consts::TAU;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// ChaCha words consumed by one Gaussian variate (two `u64` draws).
const WORDS_PER_VARIATE: u128 = 4;

/// Standard normal variates from one counter-addressable ChaCha8 stream.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    rng: ChaCha8Rng,
}

impl GaussianStream {
    /// Stream for `sample`, positioned at variate 0.
    pub fn new(seed: u64, sample: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(sample);
        Self { rng }
    }

    /// Stream for `sample`, positioned at variate `counter`.
    pub fn at(seed: u64, sample: u64, counter: u64) -> Self {
        let mut s = Self::new(seed, sample);
        s.rng.set_word_pos(WORDS_PER_VARIATE * u128::from(counter));
        s
    }

    /// Box-Muller, cosine branch only, so each variate uses exactly
    /// [`WORDS_PER_VARIATE`] words.
    pub fn next_normal(&mut self) -> f64 {
        let a = self.rng.next_u64();
        let b = self.rng.next_u64();
        // (0, 1) and [0, 1)
        let u1 = ((a >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
        let u2 = (b >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_access_matches_sequential() {
        let mut s = GaussianStream::new(7, 3);
        let seq: Vec<f64> = (0..50).map(|_| s.next_normal()).collect();
        for c in [0u64, 1, 17, 49] {
            assert_eq!(GaussianStream::at(7, 3, c).next_normal(), seq[c as usize]);
        }
    }

    #[test]
    fn streams_differ() {
        let a = GaussianStream::new(7, 0).next_normal();
        let b = GaussianStream::new(7, 1).next_normal();
        let c = GaussianStream::new(8, 0).next_normal();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn moments() {
        let mut s = GaussianStream::new(1, 0);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| s.next_normal()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt());
        assert!((var - 1.0).abs() < 4.0 * (2.0 / n as f64).sqrt());
    }
}
