//! Seeded random streams.
//!
//! Every stochastic routine takes a 64-bit seed. Independent runs use
//! independent ChaCha8 streams of the same seed, indexed by run number.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws an index from the (not necessarily normalized) weights `w` by
/// inverse transform on a single uniform.
pub fn draw<R: Rng + ?Sized>(rng: &mut R, w: &[f64]) -> usize {
    let total: f64 = w.iter().sum();
    pick(w, rng.gen::<f64>() * total)
}

/// Index `i` with `Σ_{j<i} w_j ≤ target < Σ_{j≤i} w_j`, clamped to the last
/// positive weight against rounding.
pub(crate) fn pick(w: &[f64], target: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in w.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if target < acc {
                return i;
            }
        }
    }
    last
}
