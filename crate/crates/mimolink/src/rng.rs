//! Deterministic hierarchical random streams.
//!
//! One root seed drives every random draw in a run. Each consumer derives its
//! own child stream by index, so results are bitwise identical no matter how
//! work is split across threads. The derivation tree used by the simulator:
//!
//! ```text
//! root(seed)
//!   .child(point)                 one per sweep grid point
//!     .child(0)                   throughput lane
//!       .child(trial)             one per Monte Carlo trial
//!         .child(subframe)
//!           .child(0) channel     -> .child(tap).child(antenna_pair)
//!           .child(1) noise
//!           .child(2) payload
//!     .child(1)                   capacity lane
//!       .child(draw)              one per channel draw
//! ```
//!
//! Child derivation is a splitmix64 mix of the parent state and the index;
//! leaf streams seed a `ChaCha8Rng`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A node in the seed-derivation tree. Copyable and thread-safe; deriving a
/// child or instantiating an RNG never mutates the parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stream(u64);

impl Stream {
    pub fn root(seed: u64) -> Stream {
        Stream(mix(seed))
    }

    pub fn child(self, index: u64) -> Stream {
        Stream(mix(self.0 ^ mix(index.wrapping_mul(GOLDEN) ^ 0x5851_F42D_4C95_7F2D)))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Raw derived state, reported in sweep rows for reproducibility.
    pub fn state(self) -> u64 {
        self.0
    }
}
