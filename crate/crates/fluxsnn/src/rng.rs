//! Deterministic random streams.
//!
//! One 64-bit run seed fans out into named substreams (encoding,
//! weight-init, data-shuffle) so that changing how one stage uses
//! randomness never perturbs the others. Streams are ChaCha8 generators
//! keyed by a splitmix64 chain over the seed, the label, and any fork
//! tags, which makes every stream independently re-derivable from
//! `(seed, label, tags)` alone.

use std::convert::Infallible;

use rand::{SeedableRng, TryRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Substream labels understood by [`make_rng`].
pub const STREAM_LABELS: &[&str] = &["encoding", "weight-init", "data-shuffle"];

#[derive(Debug, Error, PartialEq)]
pub enum RngError {
    #[error("unknown rng stream label `{0}` (expected one of: encoding, weight-init, data-shuffle)")]
    UnknownLabel(String),
}

/// A deterministic, independently seedable random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    chain: u64,
    rng: ChaCha8Rng,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xCBF2_9CE4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Create the named substream for a run seed.
///
/// Identical `(seed, label)` always yields the identical draw sequence,
/// on every platform.
pub fn make_rng(seed: u64, label: &str) -> Result<RngStream, RngError> {
    if !STREAM_LABELS.contains(&label) {
        return Err(RngError::UnknownLabel(label.to_string()));
    }
    let chain = splitmix64(splitmix64(seed) ^ fnv1a64(label.as_bytes()));
    Ok(RngStream::from_chain(chain))
}

impl RngStream {
    fn from_chain(chain: u64) -> Self {
        let mut seed = [0u8; 32];
        let mut k = chain;
        for word in 0..4 {
            k = splitmix64(k);
            seed[word * 8..word * 8 + 8].copy_from_slice(&k.to_le_bytes());
        }
        Self {
            chain,
            rng: ChaCha8Rng::from_seed(seed),
        }
    }

    /// Derive an independent child stream from this stream's identity and
    /// the given tags. Forking does not consume or depend on draw state,
    /// so the same `(parent, tags)` pair is always re-derivable.
    pub fn fork(&self, tags: &[u64]) -> RngStream {
        let mut chain = self.chain;
        for &t in tags {
            chain = splitmix64(chain ^ t);
        }
        // Distinguish a fork from its own parent even with empty tags.
        RngStream::from_chain(splitmix64(chain ^ 0xF0F0_F0F0_F0F0_F0F0))
    }
}

// Infallible TryRng gives the blanket `Rng` (and `RngExt`) impls.
impl TryRng for RngStream {
    type Error = Infallible;

    fn try_next_u32(&mut self) -> Result<u32, Infallible> {
        self.rng.try_next_u32()
    }

    fn try_next_u64(&mut self) -> Result<u64, Infallible> {
        self.rng.try_next_u64()
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), Infallible> {
        self.rng.try_fill_bytes(dest)
    }
}
