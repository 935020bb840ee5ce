//! Second derivatives of the normalized means and certification of which
//! mean differences are convex.
//!
//! A difference `D_{UV}(a, b) = b f_{UV}(a/b)` is jointly convex on the
//! positive quadrant exactly when `f_{UV}'' >= 0` on `(0, inf)`, so everything
//! here works on the one-variable normalized forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::means::{self, DifferencePair, MeanKind, NormalizedArg, PositivePair};

/// Curvature below this is treated as genuinely negative rather than roundoff.
pub const NEGATIVE_CURVATURE_THRESHOLD: f64 = -1e-12;

/// `f_M''(x)` in closed form.
pub fn mean_curvature(kind: MeanKind, x: NormalizedArg) -> f64 {
    curvature_at(kind, x.get())
}

pub(crate) fn curvature_at(kind: MeanKind, x: f64) -> f64 {
    let u3 = (x + 1.0).powi(3);
    match kind {
        MeanKind::Harmonic => -4.0 / u3,
        MeanKind::Geometric => -0.25 / (x * x.sqrt()),
        MeanKind::Heronian => -1.0 / (12.0 * x * x.sqrt()),
        MeanKind::Arithmetic => 0.0,
        MeanKind::Centroidal => 4.0 / (3.0 * u3),
        MeanKind::RootMeanSquare => {
            let q = x * x + 1.0;
            1.0 / (std::f64::consts::SQRT_2 * q * q.sqrt())
        }
        MeanKind::ContraHarmonic => 4.0 / u3,
    }
}

/// `f_M'(x)` in closed form.
pub fn mean_slope(kind: MeanKind, x: NormalizedArg) -> f64 {
    slope_at(kind, x.get())
}

fn slope_at(kind: MeanKind, x: f64) -> f64 {
    let u2 = (x + 1.0).powi(2);
    match kind {
        MeanKind::Harmonic => 2.0 / u2,
        MeanKind::Geometric => 0.5 / x.sqrt(),
        MeanKind::Heronian => (1.0 + 0.5 / x.sqrt()) / 3.0,
        MeanKind::Arithmetic => 0.5,
        MeanKind::Centroidal => 2.0 / 3.0 * (1.0 - 1.0 / u2),
        MeanKind::RootMeanSquare => x / (2.0 * (x * x + 1.0)).sqrt(),
        MeanKind::ContraHarmonic => 1.0 - 2.0 / u2,
    }
}

/// `f_{UV}''(x) = f_U''(x) - f_V''(x)`.
pub fn difference_curvature(d: DifferencePair, x: NormalizedArg) -> f64 {
    difference_curvature_at(d, x.get())
}

pub(crate) fn difference_curvature_at(d: DifferencePair, x: f64) -> f64 {
    curvature_at(d.upper(), x) - curvature_at(d.lower(), x)
}

/// `f_{UV}'(x)`.
pub fn difference_slope(d: DifferencePair, x: NormalizedArg) -> f64 {
    slope_at(d.upper(), x.get()) - slope_at(d.lower(), x.get())
}

/// Central second difference `(f(x-h) - 2 f(x) + f(x+h)) / h^2` of `f_{UV}`.
pub fn finite_difference_curvature(d: DifferencePair, x: NormalizedArg, step: f64) -> Result<f64> {
    let x = x.get();
    if !(step.is_finite() && x - step > 0.0 && step >= 1e-6 * x.max(1.0)) {
        return Err(Error::InvalidStep { x, step });
    }
    let f = |t: f64| means::normalized_difference(d, NormalizedArg::new(t).expect("t > 0"));
    Ok((f(x - step) - 2.0 * f(x) + f(x + step)) / (step * step))
}

/// Points at which convexity is probed.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureGrid {
    points: Vec<f64>,
}

impl CurvatureGrid {
    /// `log_points` log-spaced on `[lo, hi]` plus `band_points` uniform on
    /// `[band_lo, band_hi]`.
    pub fn new(lo: f64, hi: f64, log_points: usize, band: (f64, f64), band_points: usize) -> Result<Self> {
        if !(lo > 0.0 && hi >= lo && band.0 > 0.0 && band.1 >= band.0) || log_points < 2 {
            return Err(Error::InvalidStrategy(format!("bad curvature grid [{lo}, {hi}]")));
        }
        let (llo, lhi) = (lo.ln(), hi.ln());
        let mut points: Vec<f64> =
            (0..log_points).map(|i| (llo + (lhi - llo) * i as f64 / (log_points - 1) as f64).exp()).collect();
        if band_points >= 2 {
            points.extend((0..band_points).map(|i| band.0 + (band.1 - band.0) * i as f64 / (band_points - 1) as f64));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

impl Default for CurvatureGrid {
    /// 10^4 log-spaced points on `[1e-4, 1e4]` and 10^3 uniform on `[0.9, 1.1]`.
    fn default() -> Self {
        Self::new(1e-4, 1e4, 10_000, (0.9, 1.1), 1_000).expect("static grid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convexity {
    Convex,
    NotConvex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexityVerdict {
    pub pair: DifferencePair,
    pub verdict: Convexity,
    /// Most negative curvature point, present only for `NotConvex`.
    pub witness: Option<NormalizedArg>,
    /// Smallest curvature seen on the grid.
    pub min_curvature: f64,
}

/// Grid-based convexity certificate for `D_{UV}`.
pub fn convexity_certify(d: DifferencePair, grid: &CurvatureGrid) -> ConvexityVerdict {
    let (x_min, c_min) = grid
        .points()
        .iter()
        .map(|&x| (x, difference_curvature_at(d, x)))
        .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    let convex = c_min >= NEGATIVE_CURVATURE_THRESHOLD;
    ConvexityVerdict {
        pair: d,
        verdict: if convex { Convexity::Convex } else { Convexity::NotConvex },
        witness: if convex { None } else { NormalizedArg::new(x_min).ok() },
        min_curvature: c_min,
    }
}

/// Certificates for all 21 differences on the default grid.
pub fn certify_all() -> Vec<ConvexityVerdict> {
    let grid = CurvatureGrid::default();
    DifferencePair::all().into_iter().map(|d| convexity_certify(d, &grid)).collect()
}

/// `phi_f(a, b) = a f(b / a)` for `f = f_{UV}`.
pub fn perspective(d: DifferencePair, p: PositivePair) -> f64 {
    // a f(b/a) = D_{UV}(b, a) = D_{UV}(a, b) by symmetry
    means::difference(d, p.swapped())
}

/// Checks `0 <= phi_f(a,b) <= ((b - a)/a) phi_{f'}(a,b)` for `f = f_{UV}`,
/// the gap bound that holds for every convex `f` with `f(1) = f'(1) = 0`.
pub fn convex_gap_bound_holds(d: DifferencePair, p: PositivePair) -> bool {
    let (a, b) = (p.a(), p.b());
    let y = NormalizedArg::new(b / a).expect("b/a > 0");
    let phi = perspective(d, p);
    // ((b-a)/a) * a f'(b/a)
    let bound = (b - a) * difference_slope(d, y);
    let slack = 1e-12 * phi.abs().max(bound.abs()) + 1e-14 * a.max(b);
    phi >= -slack && phi <= bound + slack
}

#[cfg(test)]
mod tests {
    use super::*;
    use MeanKind::*;

    fn x(v: f64) -> NormalizedArg {
        NormalizedArg::new(v).unwrap()
    }

    fn pair(u: MeanKind, v: MeanKind) -> DifferencePair {
        DifferencePair::new(u, v).unwrap()
    }

    #[test]
    fn per_mean_worked_values() {
        for v in [0.1, 1.0, 42.0] {
            assert_eq!(mean_curvature(Arithmetic, x(v)), 0.0);
        }
        assert_eq!(mean_curvature(Geometric, x(1.0)), -0.25);
        assert_eq!(mean_curvature(ContraHarmonic, x(1.0)), 0.5);
    }

    #[test]
    fn difference_worked_values() {
        assert_eq!(difference_curvature(pair(Arithmetic, Geometric), x(1.0)), 0.25);
        assert_eq!(difference_curvature(pair(Arithmetic, Harmonic), x(1.0)), 0.5);
        assert!((difference_curvature(pair(RootMeanSquare, Arithmetic), x(1.0)) - 0.25).abs() < 1e-16);
    }

    #[test]
    fn finite_differences_match_closed_form() {
        let fd = finite_difference_curvature(pair(Arithmetic, Geometric), x(1.0), 1e-4).unwrap();
        assert!((fd - 0.25).abs() < 1e-6, "{fd}");
        let fd = finite_difference_curvature(pair(ContraHarmonic, Centroidal), x(1.0), 1e-4).unwrap();
        assert!((fd - 1.0 / 3.0).abs() < 1e-6, "{fd}");
    }

    #[test]
    fn finite_difference_rejects_bad_steps() {
        let d = pair(RootMeanSquare, Arithmetic);
        assert!(matches!(finite_difference_curvature(d, x(1e-7), 1e-4), Err(Error::InvalidStep { .. })));
        assert!(finite_difference_curvature(d, x(2.0), 1e-7).is_err());
        assert!(finite_difference_curvature(d, x(2.0), f64::NAN).is_err());
    }

    #[test]
    fn slopes_match_central_differences() {
        let h = 1e-6;
        for k in MeanKind::CHAIN {
            for v in [0.3, 1.0, 4.0] {
                let f = |t: f64| means::normalized(k, x(t));
                let fd = (f(v + h) - f(v - h)) / (2.0 * h);
                assert!((fd - mean_slope(k, x(v))).abs() < 1e-8, "{k} at {v}");
            }
        }
    }

    #[test]
    fn known_verdicts() {
        let grid = CurvatureGrid::default();
        assert_eq!(convexity_certify(pair(ContraHarmonic, RootMeanSquare), &grid).verdict, Convexity::Convex);
        assert_eq!(convexity_certify(pair(Arithmetic, Harmonic), &grid).verdict, Convexity::Convex);
        for d in [pair(Geometric, Harmonic), pair(RootMeanSquare, Centroidal), pair(Heronian, Harmonic)] {
            let v = convexity_certify(d, &grid);
            assert_eq!(v.verdict, Convexity::NotConvex, "{d}");
            let w = v.witness.unwrap();
            assert!(difference_curvature(d, w) < -1e-10);
        }
    }

    #[test]
    fn gap_bound_worked_points() {
        let ag = pair(Arithmetic, Geometric);
        assert!(convex_gap_bound_holds(ag, PositivePair::new(1.0, 1.0).unwrap()));
        assert!(convex_gap_bound_holds(ag, PositivePair::new(1.0, 4.0).unwrap()));
        assert!(convex_gap_bound_holds(pair(ContraHarmonic, RootMeanSquare), PositivePair::new(2.0, 3.0).unwrap()));
        // hand value at (1,4): phi = D_AG(1,4) = 2.5 - 2 = 0.5, bound = 3 * (1/2 - 1/4) = 0.75
        assert!((perspective(ag, PositivePair::new(1.0, 4.0).unwrap()) - 0.5).abs() < 1e-15);
    }
}
