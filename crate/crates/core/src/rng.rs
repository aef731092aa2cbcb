//! Counter-based random streams.
//!
//! Every Monte Carlo trial owns the ChaCha8 stream selected by its trial
//! index, so a trial's draws never depend on which worker ran it or in what
//! order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name of the generator family, echoed into sweep metadata.
pub const GENERATOR: &str = "chacha8-stream-per-trial";

/// The generator for `trial` under `seed`.
pub fn trial_stream(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
