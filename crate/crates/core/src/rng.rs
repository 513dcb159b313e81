//! Deterministic, splittable random streams.
//!
//! Every random draw in the crate comes from a [`StreamRng`] obtained by
//! labelling a master seed with a path of integers (replication, round,
//! purpose, ...). Two different paths give statistically independent
//! streams, and the same path always gives the same stream, so results do
//! not depend on evaluation order or thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator behind every stream.
pub type StreamRng = ChaCha8Rng;

/// What a stream is used for. Distinct purposes never share draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Thresholds = 1,
    Distill = 2,
    Evaluation = 3,
    Exploration = 4,
    Oracle = 5,
    Generator = 6,
    Replication = 7,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A node in the stream tree: a 64-bit key that can be split further.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedStream {
    key: u64,
}

impl SeedStream {
    pub fn new(master: u64) -> Self {
        Self { key: splitmix64(master) }
    }

    /// Child stream labelled by `label`.
    pub fn child(self, label: u64) -> Self {
        Self {
            key: splitmix64(self.key ^ splitmix64(label.wrapping_add(0xA076_1D64_78BD_642F))),
        }
    }

    pub fn purpose(self, purpose: Purpose) -> Self {
        self.child(purpose as u64)
    }

    pub fn key(self) -> u64 {
        self.key
    }

    pub fn rng(self) -> StreamRng {
        StreamRng::seed_from_u64(self.key)
    }

    /// Shorthand for `self.child(round).purpose(purpose).rng()`.
    pub fn round_rng(self, round: u64, purpose: Purpose) -> StreamRng {
        self.child(round).purpose(purpose).rng()
    }
}
