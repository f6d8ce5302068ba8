//! Seeded random streams and deterministic seed derivation.
//!
//! Every stochastic operation in this crate takes an explicit RNG. A single
//! experiment seed fans out into independent streams through [`SeedTree`]:
//! child seeds are derived by hashing `(parent seed, label, index)` with
//! FNV-1a, so simulation batches can be produced in any order — or in
//! parallel — and still yield identical results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used throughout: fast, seedable, platform-independent stream.
pub type Rng = ChaCha8Rng;

/// Build an RNG directly from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn fnv1a(mut h: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Hash arbitrary bytes to a 64-bit value (also used for content hashing).
pub fn hash_bytes(bytes: &[u8]) -> u64 {
    fnv1a(FNV_OFFSET, bytes)
}

/// Deterministic tree of seeds rooted at an experiment seed.
///
/// `child("table").index_seed(i)` always yields the same value for the same
/// root, independent of call order.
#[derive(Debug, Clone, Copy)]
pub struct SeedTree {
    seed: u64,
}

impl SeedTree {
    pub fn new(seed: u64) -> Self {
        SeedTree { seed }
    }

    /// Derive a labeled child tree.
    pub fn child(&self, label: &str) -> SeedTree {
        let h = fnv1a(FNV_OFFSET, &self.seed.to_le_bytes());
        SeedTree { seed: fnv1a(h, label.as_bytes()) }
    }

    /// Seed for the `index`-th item under this node.
    pub fn index_seed(&self, index: u64) -> u64 {
        fnv1a(fnv1a(FNV_OFFSET, &self.seed.to_le_bytes()), &index.to_le_bytes())
    }

    /// RNG for the `index`-th item under this node.
    pub fn index_rng(&self, index: u64) -> Rng {
        rng_from_seed(self.index_seed(index))
    }

    /// RNG for this node itself.
    pub fn rng(&self) -> Rng {
        rng_from_seed(self.seed)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Seed derived from the bit pattern of a series, used where a replacement
/// draw must be a pure function of the data (e.g. outlier cleaning inside a
/// summary transform).
pub fn content_seed(y: &[f64]) -> u64 {
    let mut h = FNV_OFFSET;
    for &v in y {
        h = fnv1a(h, &v.to_bits().to_le_bytes());
    }
    h
}
