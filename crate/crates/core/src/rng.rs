//! Per-trial random streams.
//!
//! Trial `k` of a run with master seed `s` uses ChaCha8 seeded from `s` on stream `k`, so a
//! trial's randomness does not depend on which thread runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

pub fn trial_rng(master_seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Index `k` with `cdf[k−1] ≤ u < cdf[k]`, clamped to the last index of positive mass.
pub(crate) fn sample_cdf(cdf: &[f64], u: f64) -> usize {
    let k = cdf.partition_point(|&c| c <= u);
    if k < cdf.len() {
        return k;
    }
    let total = *cdf.last().expect("nonempty distribution");
    cdf.iter().position(|&c| c >= total).unwrap_or(cdf.len() - 1)
}
