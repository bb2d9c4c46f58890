//! Seeded, splittable random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StdRng = ChaCha8Rng;

/// Seed used when a caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x6d69_6e6b_7375_6d00;

pub fn seeded(seed: u64) -> StdRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from `seed`.
pub fn stream(seed: u64, stream: u64) -> StdRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}
