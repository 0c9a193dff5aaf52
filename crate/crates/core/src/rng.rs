//! Counter-based random number streams.
//!
//! Each Monte Carlo replicate draws from its own [`RngStream`], keyed by
//! `(master_seed, replicate_index)`. The generator is SplitMix64 viewed as a
//! counter-based function: output `i` is `mix64(key + i * GOLDEN)`, so a
//! stream is a pure function of its key and counter. Streams are plain values
//! and can be copied to worker threads; replaying a `(seed, index)` pair
//! replays the exact draw sequence on any worker layout.

use crate::dist::normal_quantile;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer; bijective 64-bit mix.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic uniform/Gaussian stream for one replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    key: u64,
    counter: u64,
}

impl RngStream {
    /// Stream for `replicate_index` under `master_seed`. Distinct indices
    /// give statistically independent streams.
    pub fn new(master_seed: u64, replicate_index: u64) -> Self {
        let key = mix64(master_seed ^ mix64(replicate_index.wrapping_mul(GOLDEN) ^ GOLDEN));
        RngStream { key, counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform draw on the open interval (0, 1), 53-bit resolution.
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal draw via the inverse-CDF transform of one uniform.
    #[inline]
    pub fn next_standard_normal(&mut self) -> f64 {
        normal_quantile(self.next_uniform())
    }

    /// `mean + sd * z` with `z` standard normal; `sd = 0` returns `mean`
    /// exactly (the uniform is still consumed, keeping counters aligned).
    #[inline]
    pub fn next_normal(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.next_standard_normal()
    }
}

/// `n` independent Normal(mean, sd^2) draws from `stream`.
pub fn normal_draws(stream: &mut RngStream, n: usize, mean: f64, sd: f64) -> Vec<f64> {
    assert!(sd >= 0.0, "normal_draws requires sd >= 0");
    (0..n).map(|_| stream.next_normal(mean, sd)).collect()
}
