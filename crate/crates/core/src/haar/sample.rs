use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::state::{hilbert_dim, DenseState, C64};

pub const MAX_HAAR_QUBITS: usize = 20;

/// Haar-random pure state on `n` qubits: a normalized complex Gaussian vector.
pub fn haar_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<DenseState> {
    haar_sample_qudit(n, 2, rng)
}

pub fn haar_sample_qudit<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<DenseState> {
    if d == 2 && n > MAX_HAAR_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "Haar sample on {n} qubits (max {MAX_HAAR_QUBITS})"
        )));
    }
    let dim = hilbert_dim(n, d)?;
    loop {
        let amps: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if let Ok(s) = DenseState::new(n, d, amps)?.normalized() {
            return Ok(s);
        }
    }
}

/// Independent generator for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_normalized() {
        let mut rng = sample_rng(1, 0);
        for n in 1..=6 {
            let s = haar_sample(n, &mut rng).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn first_moment_matches_uniform_average() {
        // |⟨0|ψ⟩|² ~ Beta(1, 2^n - 1).
        let n = 2;
        let samples = 10_000;
        let mut rng = sample_rng(7, 0);
        let dim = 4.0;
        let mean: f64 = (0..samples)
            .map(|_| haar_sample(n, &mut rng).unwrap().amps[0].norm_sqr())
            .sum::<f64>()
            / samples as f64;
        let var = (dim - 1.0) / (dim * dim * (dim + 1.0));
        let sigma = (var / samples as f64).sqrt();
        assert!((mean - 1.0 / dim).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = haar_sample(3, &mut sample_rng(5, 2)).unwrap();
        let b = haar_sample(3, &mut sample_rng(5, 2)).unwrap();
        let c = haar_sample(3, &mut sample_rng(5, 3)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
