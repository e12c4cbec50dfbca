//! Counter-based uniform variates.
//!
//! Trial `t` of scheduled pair `p` under seed `s` always receives the same
//! 64-bit word: ChaCha8 keyed by `s`, stream `p`, word position `2t`. Blocks
//! of trials can therefore be generated in any order or on any thread.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fills `out` with the uniforms in `[0, 1)` for trials
/// `first_trial .. first_trial + out.len()` of stream `pair`.
pub fn fill_uniforms(seed: u64, pair: u64, first_trial: u64, out: &mut [f64]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(pair);
    rng.set_word_pos(u128::from(first_trial) * 2);
    for u in out.iter_mut() {
        *u = to_unit(rng.next_u64());
    }
}

pub fn uniform(seed: u64, pair: u64, trial: u64) -> f64 {
    let mut u = [0.0];
    fill_uniforms(seed, pair, trial, &mut u);
    u[0]
}

/// Top 53 bits as a float in `[0, 1)`.
fn to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
