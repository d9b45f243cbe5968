//! Deterministic, purpose-separated random-number streams.
//!
//! Reproducibility contract: every random quantity in the crate is drawn from
//! a ChaCha stream keyed by `(master seed, purpose, index)`. Streams for
//! different purposes never overlap, and index-keyed streams (one per test
//! replication, per Monte Carlo replication, per split) make parallel and
//! serial execution produce identical results.

use rand_chacha::ChaCha12Rng;
use rand::SeedableRng;

/// The purpose of a random stream. Each variant owns a disjoint key space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    /// Design-matrix generation (factor loadings, Gaussian entries, frames).
    Design,
    /// True coefficient vectors (signal positions and values).
    Alpha,
    /// Training-response noise.
    TrainNoise,
    /// Test-response noise; `index` = test-set number.
    TestNoise,
    /// Train/test split permutations; `index` = repeat number.
    Splits,
    /// Monte Carlo risk replications; `index` = replication number.
    MonteCarlo,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Design => 1,
            Stream::Alpha => 2,
            Stream::TrainNoise => 3,
            Stream::TestNoise => 4,
            Stream::Splits => 5,
            Stream::MonteCarlo => 6,
        }
    }
}

/// Build the RNG for `(seed, stream, index)`.
///
/// The 32-byte ChaCha key is the little-endian concatenation of the master
/// seed, the stream tag, the index, and a fixed mixing constant, so distinct
/// `(seed, stream, index)` triples yield distinct keys by construction.
pub fn stream_rng(seed: u64, stream: Stream, index: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.tag().to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    key[24..32].copy_from_slice(&0x9E37_79B9_7F4A_7C15u64.to_le_bytes());
    ChaCha12Rng::from_seed(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn first_draws(seed: u64, stream: Stream, index: u64) -> [f64; 4] {
        let mut rng = stream_rng(seed, stream, index);
        std::array::from_fn(|_| rng.random::<f64>())
    }

    #[test]
    fn same_key_reproduces_bitwise() {
        assert_eq!(
            first_draws(7, Stream::Design, 0),
            first_draws(7, Stream::Design, 0)
        );
    }

    #[test]
    fn different_streams_and_indices_decorrelate() {
        let base = first_draws(7, Stream::Design, 0);
        assert_ne!(base, first_draws(7, Stream::Alpha, 0));
        assert_ne!(base, first_draws(7, Stream::Design, 1));
        assert_ne!(base, first_draws(8, Stream::Design, 0));
    }
}
