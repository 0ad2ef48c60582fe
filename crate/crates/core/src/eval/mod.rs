//! Monte Carlo BER, exact sum-rate of the quantized channel, SNR bookkeeping
//! and branch-and-bound complexity profiling.
//!
//! Evaluation runs in `f64`. Every random draw comes from a ChaCha8 stream
//! selected by [`trial_rng`]: the master seed picks the key and the block
//! index picks the stream, so any subset of blocks can be recomputed alone
//! and the split across worker threads does not change the result.

mod ber;
mod complexity;
mod snr;
mod sumrate;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use ber::{simulate_ber, BerConfig, BerRecord};
pub use complexity::{complexity_profile, loglog_slope, ComplexityConfig, ComplexityProfile, ComplexityRecord};
pub use snr::{sigma_to_snr, snr_to_sigma, SnrPoint};
pub use sumrate::{
    sum_rate, sum_rate_sweep, ErfcConvention, SumRate, SumRateConfig, SumRateRecord, SUM_RATE_MAX_RX,
};

/// Random stream for block `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `f` over `0..n` on up to `workers` threads and returns the results
/// in index order.
pub(crate) fn parallel_map<R, F>(n: usize, workers: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    let workers = workers.clamp(1, n.max(1));
    if workers == 1 {
        return (0..n).map(f).collect();
    }
    let chunk = n.div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                scope.spawn(move || (w * chunk..((w + 1) * chunk).min(n)).map(f).collect::<Vec<R>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}

/// Worker count from the machine, at least one.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
