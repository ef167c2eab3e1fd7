//! Deterministic block-parallel Monte Carlo.
//!
//! Samples are cut into fixed blocks of [`BLOCK_SIZE`]. Block `b` draws from
//! ChaCha8 seeded with the user seed on stream `b`, and block statistics are
//! merged in block order, so results are bit-identical for any number of
//! worker threads.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const BLOCK_SIZE: usize = 4096;

/// Running count, mean and sum of squared deviations.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SampleStats {
    pub count: usize,
    pub mean: f64,
    pub m2: f64,
}

impl SampleStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(self, other: SampleStats) -> SampleStats {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        SampleStats {
            count,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * w,
        }
    }

    /// Sample standard deviation over `√M`.
    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        (self.m2 / (self.count - 1) as f64).sqrt() / (self.count as f64).sqrt()
    }
}

pub(crate) fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

/// Averages `draw` over `samples` draws.
pub(crate) fn run<F>(samples: usize, seed: u64, draw: F) -> Result<SampleStats>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    if samples == 0 {
        return Err(Error::invalid("Monte Carlo needs at least one sample"));
    }
    let blocks = samples.div_ceil(BLOCK_SIZE);
    let per_block: Vec<SampleStats> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let len = BLOCK_SIZE.min(samples - b * BLOCK_SIZE);
            let mut stats = SampleStats::default();
            for _ in 0..len {
                stats.push(draw(&mut rng));
            }
            stats
        })
        .collect();
    let stats = per_block
        .into_iter()
        .fold(SampleStats::default(), SampleStats::merge);
    if !stats.mean.is_finite() || !stats.m2.is_finite() {
        return Err(Error::Evaluation(
            "Monte Carlo sample produced a non-finite value".into(),
        ));
    }
    Ok(stats)
}

/// Uniform on the open interval `(0, 1)`.
#[inline]
pub(crate) fn open01(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(Open01)
}

/// Beta(2, 2) by inverting `F(t) = 3t² − 2t³` with bisection to `1e-12`.
pub fn beta22_quantile(u: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if mid * mid * (3.0 - 2.0 * mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[inline]
pub(crate) fn beta22(rng: &mut ChaCha8Rng) -> f64 {
    beta22_quantile(open01(rng))
}
