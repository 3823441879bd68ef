//! Deterministic derivation of independent sub-seeds from one master seed.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sub-seed number `stream` of `seed`: the first word of ChaCha8 stream
/// `stream` keyed by `seed`.
pub fn derive(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.next_u64()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    #[test]
    fn streams_differ_and_repeat() {
        let a = super::derive(7, 0);
        assert_eq!(a, super::derive(7, 0));
        assert_ne!(a, super::derive(7, 1));
        assert_ne!(a, super::derive(8, 0));
    }
}
