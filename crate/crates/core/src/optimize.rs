//! Scalar maximization: a coarse grid scan followed by golden-section
//! refinement on the bracketing triple.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximum found by [`grid_then_golden`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub arg: f64,
    pub value: f64,
    /// Sign changes of the discrete derivative along the grid, ignoring steps
    /// at roundoff level.
    pub slope_sign_changes: usize,
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`. The values
/// only need to be ordered, so extended-precision objectives work too.
///
/// Stops after `max_iter` iterations or once the bracket is narrower than
/// `tol`. Returns the best point seen.
pub fn golden_max<V: PartialOrd + Copy, F: Fn(f64) -> V>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    max_iter: usize,
    tol: f64,
) -> (f64, V) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if hi - lo <= tol {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Result of [`grid_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridScan {
    pub arg: f64,
    pub value: f64,
    /// Grid neighbours of `arg`, the bracket for refinement.
    pub bracket: (f64, f64),
    pub slope_sign_changes: usize,
}

/// Evaluates `f` on `n` evenly spaced points of `[lo, hi]`. Ties go to the
/// smaller argument.
pub fn grid_scan<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> GridScan {
    assert!(n >= 3 && hi > lo);
    let step = (hi - lo) / (n - 1) as f64;
    let values: Vec<f64> = (0..n).map(|i| f(lo + step * i as f64)).collect();

    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }

    let mut changes = 0;
    let mut last_sign = 0i8;
    for w in values.windows(2) {
        let delta = w[1] - w[0];
        if delta.abs() <= 1e-14 * w[0].abs().max(w[1].abs()) {
            continue;
        }
        let sign = if delta > 0.0 { 1 } else { -1 };
        if last_sign != 0 && sign != last_sign {
            changes += 1;
        }
        last_sign = sign;
    }

    GridScan {
        arg: lo + step * best as f64,
        value: values[best],
        bracket: (lo + step * best.saturating_sub(1) as f64, lo + step * (best + 1).min(n - 1) as f64),
        slope_sign_changes: changes,
    }
}

/// [`grid_scan`] followed by golden-section refinement between the grid
/// neighbours of the best point.
pub fn grid_then_golden<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize, max_iter: usize, tol: f64) -> Maximum {
    let scan = grid_scan(&f, lo, hi, n);
    let (arg, value) = golden_max(&f, scan.bracket.0, scan.bracket.1, max_iter, tol);
    let (arg, value) = if value >= scan.value { (arg, value) } else { (scan.arg, scan.value) };
    Maximum { arg, value, slope_sign_changes: scan.slope_sign_changes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let (x, v) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, -1.0, 1.0, 200, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn grid_scan_brackets_global_peak() {
        // two bumps, the right one higher
        let f = |x: f64| (-(x + 2.0).powi(2)).exp() + 1.5 * (-(x - 2.0).powi(2)).exp();
        let m = grid_then_golden(f, -6.0, 6.0, 1001, 64, 1e-12);
        assert!((m.arg - 2.0).abs() < 1e-4, "{m:?}");
        assert_eq!(m.slope_sign_changes, 3);
    }

    #[test]
    fn unimodal_has_one_sign_change() {
        let m = grid_then_golden(|x: f64| -x.abs(), -1.0, 2.0, 301, 64, 1e-12);
        assert_eq!(m.slope_sign_changes, 1);
        assert!(m.arg.abs() < 1e-9);
    }
}
