use meanforge_core::means::{self, difference, gini_mean, hellinger, mean, triangular_discrimination};
use meanforge_core::{DifferencePair, GiniOrder, MeanKind, PositivePair};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use MeanKind::*;

fn pair(a: f64, b: f64) -> PositivePair {
    PositivePair::new(a, b).unwrap()
}

fn close(x: f64, y: f64, rel: f64) -> bool {
    (x - y).abs() <= rel * x.abs().max(y.abs())
}

fn log_uniform() -> impl Strategy<Value = f64> {
    (-6.0f64..6.0).prop_map(|e| 10f64.powf(e))
}

/// Textbook formulas, evaluated directly.
fn naive(kind: MeanKind, a: f64, b: f64) -> f64 {
    match kind {
        Harmonic => 2.0 * a * b / (a + b),
        Geometric => (a * b).sqrt(),
        Heronian => (a + (a * b).sqrt() + b) / 3.0,
        Arithmetic => (a + b) / 2.0,
        Centroidal => 2.0 * (a * a + a * b + b * b) / (3.0 * (a + b)),
        RootMeanSquare => ((a * a + b * b) / 2.0).sqrt(),
        ContraHarmonic => (a * a + b * b) / (a + b),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn symmetric(a in log_uniform(), b in log_uniform()) {
        for k in MeanKind::CHAIN {
            prop_assert_eq!(mean(k, pair(a, b)).unwrap(), mean(k, pair(b, a)).unwrap());
        }
    }

    #[test]
    fn homogeneous(a in log_uniform(), b in log_uniform(), t in log_uniform()) {
        for k in MeanKind::CHAIN {
            let lhs = mean(k, pair(t * a, t * b)).unwrap();
            let rhs = t * mean(k, pair(a, b)).unwrap();
            prop_assert!(close(lhs, rhs, 1e-13), "{k:?}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn internal(a in log_uniform(), b in log_uniform()) {
        for k in MeanKind::CHAIN {
            let m = mean(k, pair(a, b)).unwrap();
            prop_assert!(a.min(b) <= m && m <= a.max(b), "{k:?}({a},{b}) = {m}");
        }
    }

    #[test]
    fn agrees_with_textbook_formulas(a in 1e-3f64..1e3, b in 1e-3f64..1e3) {
        for k in MeanKind::CHAIN {
            let m = mean(k, pair(a, b)).unwrap();
            prop_assert!(close(m, naive(k, a, b), 1e-14), "{k:?}");
        }
    }

    #[test]
    fn strict_chain_away_from_one(e in -6.0f64..6.0) {
        prop_assume!(e.abs() > 5e-5);
        let x = 10f64.powf(e);
        prop_assume!((x - 1.0).abs() > 1e-4);
        for w in MeanKind::CHAIN.windows(2) {
            let d = DifferencePair::new(w[1], w[0]).unwrap();
            prop_assert!(difference(d, pair(x, 1.0)) > 0.0, "{} at {x}", d.label());
        }
    }

    #[test]
    fn distances_are_mean_differences(a in 1e-3f64..1e3, b in 1e-3f64..1e3) {
        let p = pair(a, b);
        let ch = DifferencePair::new(ContraHarmonic, Harmonic).unwrap();
        let ag = DifferencePair::new(Arithmetic, Geometric).unwrap();
        prop_assert!(close(triangular_discrimination(p), difference(ch, p), 1e-12));
        prop_assert!(close(hellinger(p), difference(ag, p), 1e-12));
    }
}

#[test]
fn chain_collapses_at_one() {
    for b in [1e-6, 1.0, 1e6] {
        for w in MeanKind::CHAIN.windows(2) {
            let d = DifferencePair::new(w[1], w[0]).unwrap();
            assert!(difference(d, pair(b, b)).abs() < 1e-20 * b.max(1.0));
        }
    }
}

#[test]
fn gini_special_cases_that_hold() {
    let cases = [
        ((-1.0, 0.0), Harmonic),
        ((-0.5, 0.5), Geometric),
        ((0.0, 1.0), Arithmetic),
        ((0.0, 2.0), RootMeanSquare),
        ((1.0, 2.0), ContraHarmonic),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let p = pair(10f64.powf(rng.random_range(-6.0..6.0)), 10f64.powf(rng.random_range(-6.0..6.0)));
        for ((r, s), k) in cases {
            let e = gini_mean(GiniOrder::new(r, s).unwrap(), p);
            assert!(close(e, mean(k, p).unwrap(), 1e-10), "E_{{{r},{s}}} vs {k:?} at {p:?}");
        }
    }
}

#[test]
fn gini_one_two_is_not_centroidal() {
    let p = pair(4.0, 1.0);
    let e = gini_mean(GiniOrder::new(1.0, 2.0).unwrap(), p);
    assert!((e - 3.4).abs() < 1e-14);
    assert!((mean(Centroidal, p).unwrap() - 2.8).abs() < 1e-14);
}

#[test]
fn gini_monotone_in_both_orders() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let (u, v) = (rng.random_range(-8.0..8.0), rng.random_range(-8.0..8.0));
        let (r1, r2) = if u < v { (u, v) } else { (v, u) };
        let s = rng.random_range(-8.0..8.0);
        let p = pair(10f64.powf(rng.random_range(-3.0..3.0)), 10f64.powf(rng.random_range(-3.0..3.0)));
        let lo = gini_mean(GiniOrder::new(r1, s).unwrap(), p);
        let hi = gini_mean(GiniOrder::new(r2, s).unwrap(), p);
        assert!(lo <= hi * (1.0 + 1e-12), "r: {r1} {r2} s {s} {p:?}: {lo} > {hi}");
        let lo = gini_mean(GiniOrder::new(s, r1).unwrap(), p);
        let hi = gini_mean(GiniOrder::new(s, r2).unwrap(), p);
        assert!(lo <= hi * (1.0 + 1e-12), "s: {r1} {r2} r {s} {p:?}: {lo} > {hi}");
    }
}

#[test]
fn gini_survives_extreme_orders() {
    let orders = [-64.0, -63.5, -1.0, 0.0, 0.5, 1.0, 63.5, 64.0];
    let ends = [1e-6, 1.0, 1e6];
    for &r in &orders {
        for &s in &orders {
            for &a in &ends {
                for &b in &ends {
                    let p = pair(a, b);
                    let e = gini_mean(GiniOrder::new(r, s).unwrap(), p);
                    assert!(e.is_finite() && a.min(b) <= e && e <= a.max(b), "E_{{{r},{s}}}({a},{b}) = {e}");
                }
            }
        }
    }
}

#[test]
fn gini_symmetric_in_orders() {
    let p = pair(0.3, 7.0);
    for (r, s) in [(1.0, 2.0), (-3.0, 0.5), (0.0, 4.0)] {
        let e1 = gini_mean(GiniOrder::new(r, s).unwrap(), p);
        let e2 = gini_mean(GiniOrder::new(s, r).unwrap(), p);
        assert!(close(e1, e2, 1e-14));
    }
}

#[test]
fn normalized_form_matches_mean() {
    for x in [1e-5, 0.3, 1.0, 2.0, 7e4] {
        for k in MeanKind::CHAIN {
            let f = means::normalized(k, meanforge_core::NormalizedArg::new(x).unwrap());
            assert!(close(f, mean(k, pair(x, 1.0)).unwrap(), 1e-14));
        }
    }
}
