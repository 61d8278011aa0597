//! Fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wordsketch::{BitMatrix, UpdateRecord};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Signed updates over a `2^40` key universe.
pub fn signed_stream(len: usize, seed: u64) -> Vec<UpdateRecord> {
    let mut rng = rng(seed);
    (0..len)
        .map(|_| UpdateRecord::new(rng.random_range(0..1 << 40), rng.random_range(1..=16)))
        .collect()
}

pub fn matrix_pair(m: usize, r: usize, n: usize, seed: u64) -> (BitMatrix, BitMatrix) {
    let mut rng = rng(seed);
    (
        BitMatrix::random(m, r, &mut rng),
        BitMatrix::random(r, n, &mut rng),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_deterministic() {
        assert_eq!(signed_stream(100, 1), signed_stream(100, 1));
        let (a, b) = matrix_pair(8, 16, 24, 2);
        assert_eq!((a.rows(), a.cols(), b.rows(), b.cols()), (8, 16, 16, 24));
        assert_eq!(matrix_pair(8, 16, 24, 2).0, a);
    }
}
