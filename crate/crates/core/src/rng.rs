//! Labelled, reproducible random streams.
//!
//! Every consumer of randomness (protocol, adversary, referee, placement, one
//! stream per trial) draws from its own stream, derived by hashing the run
//! seed together with a label. Identical `(seed, label)` pairs replay the same
//! draws; distinct labels give unrelated streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type SimRng = ChaCha8Rng;

fn stream_key(seed: u64, label: &str) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((label.len() as u64).to_le_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    key
}

pub fn seeded_rng(seed: u64, label: &str) -> SimRng {
    SimRng::from_seed(stream_key(seed, label))
}

/// A 64-bit child seed, e.g. for one trial of a sweep.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let key = stream_key(seed, label);
    u64::from_le_bytes(key[..8].try_into().expect("8 bytes"))
}

/// Conventional labels.
pub mod labels {
    pub const PROTOCOL: &str = "protocol";
    pub const ADVERSARY: &str = "adversary";
    pub const REFEREE: &str = "referee";
    pub const PLACEMENT: &str = "placement";
    pub const GROUND_TRUTH: &str = "ground-truth";

    pub fn node(i: usize) -> String {
        format!("node:{i}")
    }

    pub fn trial(cell: usize, trial: usize) -> String {
        format!("cell:{cell}:trial:{trial}")
    }
}
