use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples per independently seeded chunk.
pub const CHUNK: usize = 4096;

/// Half-width of the band around `x = 1`.
pub const NEAR_ONE_HALF_WIDTH: f64 = 1e-3;

/// How the normalized arguments `x = a / b` are drawn.
///
/// Sample `i` comes from chunk `i / CHUNK`, whose generator is ChaCha8 seeded
/// with `seed` on stream `i / CHUNK`; the sequence therefore does not depend on
/// how chunks are spread over threads. The first `round(count *
/// near_one_fraction)` samples are uniform on `[1 - 1e-3, 1 + 1e-3]`
/// (intersected with the range), the rest log-uniform on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleStrategy {
    count: usize,
    lo: f64,
    hi: f64,
    seed: u64,
    near_one_fraction: f64,
}

impl SampleStrategy {
    pub fn new(count: usize, lo: f64, hi: f64, seed: u64, near_one_fraction: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidStrategy("sample count must be positive".into()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo) {
            return Err(Error::InvalidStrategy(format!("range [{lo}, {hi}] must satisfy 0 < lo <= hi")));
        }
        if !(0.0..=1.0).contains(&near_one_fraction) {
            return Err(Error::InvalidStrategy(format!("near-one fraction {near_one_fraction} outside [0, 1]")));
        }
        Ok(Self { count, lo, hi, seed, near_one_fraction })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn near_one_fraction(&self) -> f64 {
        self.near_one_fraction
    }

    pub fn with_count(self, count: usize) -> Result<Self> {
        Self::new(count, self.lo, self.hi, self.seed, self.near_one_fraction)
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    fn near_count(&self) -> usize {
        (self.count as f64 * self.near_one_fraction).round() as usize
    }

    fn band(&self) -> Option<(f64, f64)> {
        let lo = self.lo.max(1.0 - NEAR_ONE_HALF_WIDTH);
        let hi = self.hi.min(1.0 + NEAR_ONE_HALF_WIDTH);
        (lo <= hi).then_some((lo, hi))
    }

    pub fn chunk_count(&self) -> usize {
        self.count.div_ceil(CHUNK)
    }

    /// Index range of chunk `k`.
    pub fn chunk_bounds(&self, k: usize) -> std::ops::Range<usize> {
        let start = k * CHUNK;
        start..(start + CHUNK).min(self.count)
    }

    /// The samples of chunk `k`, in index order.
    pub fn chunk(&self, k: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k as u64);
        let near = self.near_count();
        let band = self.band();
        let (llo, lhi) = (self.lo.ln(), self.hi.ln());
        self.chunk_bounds(k)
            .map(|i| {
                let u: f64 = rng.random();
                match band {
                    Some((blo, bhi)) if i < near => blo + (bhi - blo) * u,
                    _ if self.lo == self.hi => self.lo,
                    _ => (llo + (lhi - llo) * u).exp().clamp(self.lo, self.hi),
                }
            })
            .collect()
    }

    /// All samples, in index order.
    pub fn samples(&self) -> Vec<f64> {
        (0..self.chunk_count()).flat_map(|k| self.chunk(k)).collect()
    }
}

impl Default for SampleStrategy {
    /// 10^6 samples on `[1e-6, 1e6]`, seed 42, a fifth of them near `x = 1`.
    fn default() -> Self {
        Self { count: 1_000_000, lo: 1e-6, hi: 1e6, seed: 42, near_one_fraction: 0.2 }
    }
}
