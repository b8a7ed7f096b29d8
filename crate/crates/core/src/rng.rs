//! Replayable random streams keyed by `(seed, worker, round)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Words reserved per round inside one worker's stream.
const WORDS_PER_ROUND: u128 = 1 << 40;

/// ChaCha stream `worker` of `seed`, positioned at the start of `round`.
pub fn stream(seed: u64, worker: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker);
    rng.set_word_pos(round as u128 * WORDS_PER_ROUND);
    rng
}

/// Uniform point of `[-1, 1]^n`.
pub fn uniform_box<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}
