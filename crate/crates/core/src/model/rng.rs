//! Seeding conventions.
//!
//! Every random draw comes from a ChaCha8 generator seeded with a 64-bit
//! realization seed and a stream id from [`streams`]. Realization seeds in a
//! sweep are derived from `(master seed, point index, realization index)` by
//! [`derive_seed`], so the numbers a realization sees do not depend on which
//! thread runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub mod streams {
    pub const DISORDER: u64 = 0;
    pub const THERMAL: u64 = 1;
    pub const MCMC: u64 = 2;
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// First eight bytes (little endian) of SHA-256 over the three indices.
pub fn derive_seed(master: u64, point: u64, realization: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(point.to_le_bytes());
    h.update(realization.to_le_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
