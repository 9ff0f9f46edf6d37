//! Deterministic seed derivation for nested, parallelizable randomness.
//!
//! Every unit of work (a subject, a bootstrap replicate, a simulation
//! replication) gets its own counter-based substream derived from a master
//! seed, so results are identical regardless of evaluation order or worker
//! count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mix a tag into a seed (splitmix64 finalizer). Used to derive independent
/// child seeds for the stages of a pipeline.
pub fn mix(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// An RNG for substream `stream` of the generator keyed by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stage tags for the simulation and experiment pipelines.
pub mod tags {
    pub const LATENT: u64 = 1;
    pub const TRUNCATION: u64 = 2;
    pub const CENSORING: u64 = 3;
    pub const ORACLE: u64 = 4;
    pub const REPLICATION: u64 = 5;
    pub const BOOTSTRAP: u64 = 6;
}
