//! Seeded, counter-based randomness for tie-breaking.
//!
//! Every consumer gets its own ChaCha8 stream selected from the global seed
//! by a tag, so results do not depend on evaluation order or thread count.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INDEX_BITS: u32 = 31;
const INDEX_MASK: u64 = (1 << INDEX_BITS) - 1;

/// Purpose of a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamTag {
    /// Neighbours in the space without columns `a` and `b` (unordered).
    Conditioning { a: usize, b: usize },
    /// Neighbours in the space without column `i`.
    Extended { i: usize },
    /// Free-form derived seeds, e.g. simulation replications.
    Derived { index: u64 },
}

impl StreamTag {
    fn word(self) -> u64 {
        match self {
            StreamTag::Conditioning { a, b } => {
                let (lo, hi) = (a.min(b) as u64, a.max(b) as u64);
                debug_assert!(hi <= INDEX_MASK);
                (1 << 62) | (lo << INDEX_BITS) | hi
            }
            StreamTag::Extended { i } => {
                debug_assert!(i as u64 <= INDEX_MASK);
                (2 << 62) | i as u64
            }
            StreamTag::Derived { index } => (3 << 62) | (index & ((1 << 62) - 1)),
        }
    }
}

/// Source of uniform choices among equidistant neighbours.
#[derive(Debug, Clone)]
pub struct TieStream {
    rng: ChaCha8Rng,
}

impl TieStream {
    pub fn new(seed: u64, tag: StreamTag) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(tag.word());
        Self { rng }
    }

    /// Picks one of `candidates` uniformly. Draws only when there is a tie.
    pub fn pick(&mut self, candidates: &[usize]) -> usize {
        match candidates {
            [] => panic!("no candidates to pick from"),
            [only] => *only,
            _ => candidates[self.rng.random_range(0..candidates.len())],
        }
    }
}

/// Deterministic child seed `index` of `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(StreamTag::Derived { index }.word());
    rng.next_u64()
}
