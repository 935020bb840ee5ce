use meanforge_core::ratio::{
    auxiliary_check, curvature_certified_specs, difference_bound_constants, difference_ratio, sandwich_holds,
    sharp_constant, sharpness_witness, Auxiliary, RatioSpec,
};
use meanforge_core::{NormalizedArg, PositivePair};
use proptest::prelude::*;

fn to_f64(c: num_rational::Ratio<i64>) -> f64 {
    *c.numer() as f64 / *c.denom() as f64
}

#[test]
fn measured_constants_match_table() {
    for (spec, c) in difference_bound_constants() {
        let s = sharp_constant(spec).unwrap();
        let want = to_f64(c);
        assert!((s.beta - want).abs() <= 1e-9, "{}: {} vs {want}", spec.label(), s.beta);
        assert!((s.argmax.get() - 1.0).abs() <= 1e-6, "{}: argmax {}", spec.label(), s.argmax.get());
    }
}

#[test]
fn curvature_route_agrees_where_certified() {
    let certified = curvature_certified_specs();
    for (spec, c) in difference_bound_constants() {
        let s = sharp_constant(spec).unwrap();
        if certified.contains(&spec) {
            assert!(s.lemma_applies, "{}", spec.label());
            assert!((s.curvature_sup - to_f64(c)).abs() <= 1e-9, "{}", spec.label());
        }
    }
    // the tails of g exceed the constant for these two
    for label in ["SN/CN", "CN/CS"] {
        let s = sharp_constant(RatioSpec::parse(label).unwrap()).unwrap();
        assert!(!s.lemma_applies, "{label}");
    }
}

#[test]
fn shrunken_constant_fails_near_one() {
    for (spec, c) in difference_bound_constants() {
        let beta = to_f64(c) * (1.0 - 1e-3);
        let x = sharpness_witness(spec, beta).unwrap_or_else(|| panic!("{} has no witness", spec.label()));
        assert!(x.ln().abs() <= 1.0, "{}: {x}", spec.label());
    }
}

#[test]
fn auxiliaries_are_positive_and_consistent() {
    for aux in Auxiliary::ALL {
        for x in [1e-3, 0.2, 0.7, 1.3, 5.0, 1e3] {
            let v = auxiliary_check(aux, NormalizedArg::new(x).unwrap());
            assert!(v.value > 0.0, "{} at {x}: {}", aux.name(), v.value);
            assert!(v.residual <= 1e-9 * v.value.abs().max(1.0), "{} at {x}: {v:?}", aux.name());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn bounds_sandwich_random_points(ea in -6.0f64..6.0, eb in -6.0f64..6.0) {
        let p = PositivePair::new(10f64.powf(ea), 10f64.powf(eb)).unwrap();
        for (spec, c) in difference_bound_constants() {
            prop_assert!(sandwich_holds(spec, 0.0, to_f64(c), p).unwrap(), "{} at {p:?}", spec.label());
        }
    }

    #[test]
    fn measured_beta_dominates_ratio(e in -6.0f64..6.0) {
        let x = NormalizedArg::new(10f64.powf(e)).unwrap();
        prop_assume!((x.get() - 1.0).abs() > 1e-6);
        for (spec, c) in difference_bound_constants() {
            let r = difference_ratio(spec, x).unwrap();
            prop_assert!(r <= to_f64(c) + 1e-9, "{} at {}: {r}", spec.label(), x.get());
        }
    }
}

#[test]
fn rejects_non_convex_denominators() {
    assert!(RatioSpec::parse("AN/SR").is_err());
    assert!(RatioSpec::parse("CG/GH").is_err());
    assert!(RatioSpec::parse("nonsense").is_err());
}
