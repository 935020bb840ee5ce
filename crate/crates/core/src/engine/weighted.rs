//! The five weighted differences
//!
//! ```text
//! W1 = Delta / 4,  W2 = 3/7 D_CN,  W3 = 1/3 D_CG,  W4 = 3/5 D_RG,  W5 = h
//! ```
//!
//! and the ten weighted gaps `c_ij (W_i - W_j)`, which all coincide.
//!
//! The gaps are fourth order in `a - b` while the `W` are second order, so in
//! `f64` they lose about half their digits near `a = b`. Everything here is
//! computed in double-double and rounded once at the end.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::SampleStrategy;
use crate::dd::{DoubleDouble, Real};
use crate::means::{self, DifferencePair, MeanKind, PositivePair};

type Dd = DoubleDouble;

/// `(i, j, p, q)`: the gap `W_i - W_j` carries weight `p / q`.
pub const GAP_WEIGHTS: [(usize, usize, i64, i64); 10] = [
    (2, 1, 7, 2),
    (3, 2, 21, 8),
    (3, 1, 3, 2),
    (4, 3, 15, 8),
    (4, 2, 35, 32),
    (4, 1, 5, 6),
    (5, 4, 5, 4),
    (5, 3, 3, 4),
    (5, 2, 7, 12),
    (5, 1, 1, 2),
];

/// Spread denominators below this are clamped, so `a = b` reports zero.
pub const SPREAD_FLOOR: f64 = f64::MIN_POSITIVE;

fn ratio(p: i64, q: i64) -> Dd {
    Dd::from_f64(p as f64) / Dd::from_f64(q as f64)
}

fn diff(u: MeanKind, v: MeanKind, p: PositivePair) -> Dd {
    means::difference_in(DifferencePair::new(u, v).expect("static pair"), p)
}

fn w_values(p: PositivePair) -> [Dd; 5] {
    use MeanKind::*;
    [
        means::triangular_discrimination_in::<Dd>(p) * ratio(1, 4),
        diff(ContraHarmonic, Heronian, p) * ratio(3, 7),
        diff(ContraHarmonic, Geometric, p) * ratio(1, 3),
        diff(Centroidal, Geometric, p) * ratio(3, 5),
        means::hellinger_in::<Dd>(p),
    ]
}

/// `W_1 .. W_5` at `p`, rounded to `f64`.
pub fn w_atoms(p: PositivePair) -> [f64; 5] {
    w_values(p).map(Dd::to_f64)
}

/// `(sqrt a - sqrt b)^4 / (a + b)`.
pub fn quartic(p: PositivePair) -> f64 {
    quartic_dd(p).to_f64()
}

fn quartic_dd(p: PositivePair) -> Dd {
    let q = means::hellinger_in::<Dd>(p) * Dd::from_f64(2.0);
    q * (q / (Dd::from_f64(p.a()) + Dd::from_f64(p.b())))
}

/// The ten weighted gaps at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedGaps {
    /// In the order of [`GAP_WEIGHTS`].
    pub values: [f64; 10],
    /// `(max - min) / max(|max|, SPREAD_FLOOR)`.
    pub spread: f64,
    /// Mean gap divided by [`quartic`]; `None` when `a = b`.
    pub ratio_to_quartic: Option<f64>,
}

pub fn weighted_gaps(p: PositivePair) -> WeightedGaps {
    let w = w_values(p);
    let gaps: Vec<Dd> = GAP_WEIGHTS.iter().map(|&(i, j, n, d)| (w[i - 1] - w[j - 1]) * ratio(n, d)).collect();
    let values: [f64; 10] = std::array::from_fn(|k| gaps[k].to_f64());
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = (max - min) / max.abs().max(SPREAD_FLOOR);
    let quart = quartic_dd(p);
    let ratio_to_quartic = (p.a() != p.b() && quart.to_f64() > 0.0).then(|| {
        let mean = gaps.iter().fold(Dd::ZERO, |acc, &g| acc + g) / Dd::from_f64(10.0);
        (mean / quart).to_f64()
    });
    WeightedGaps { values, spread, ratio_to_quartic }
}

/// Summary of [`weighted_gaps`] over a sample set (with `b = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedSurvey {
    pub samples: usize,
    pub max_spread: f64,
    /// Where `max_spread` occurred, as `x = a / b`.
    pub max_spread_at: f64,
    pub ratio_mean: f64,
    pub ratio_stdev: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Samples with `a = b`, where the ratio is undefined.
    pub undefined_ratios: usize,
}

pub fn weighted_survey(strategy: &SampleStrategy) -> WeightedSurvey {
    let chunks: Vec<Vec<(f64, WeightedGaps)>> = (0..strategy.chunk_count())
        .into_par_iter()
        .map(|k| {
            strategy
                .chunk(k)
                .into_iter()
                .map(|x| (x, weighted_gaps(PositivePair::new(x, 1.0).expect("positive sample"))))
                .collect()
        })
        .collect();

    let mut max_spread = (0.0, 1.0);
    let mut ratios = Vec::with_capacity(strategy.count());
    let mut undefined = 0;
    for (x, g) in chunks.into_iter().flatten() {
        if g.spread > max_spread.0 {
            max_spread = (g.spread, x);
        }
        match g.ratio_to_quartic {
            Some(r) => ratios.push(r),
            None => undefined += 1,
        }
    }
    let n = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / n;
    let var = if ratios.len() > 1 { ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    WeightedSurvey {
        samples: strategy.count(),
        max_spread: max_spread.0,
        max_spread_at: max_spread.1,
        ratio_mean: if ratios.is_empty() { f64::NAN } else { mean },
        ratio_stdev: var.sqrt(),
        ratio_min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        ratio_max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        undefined_ratios: undefined,
    }
}
