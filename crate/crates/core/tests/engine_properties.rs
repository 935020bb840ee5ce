use meanforge_core::dsl::parse_relation;
use meanforge_core::engine::{
    counterexample_search, run_suite, verify_relation, weighted_survey, SampleStrategy, Suite, Tolerance,
    NEAR_ONE_HALF_WIDTH,
};

const FAILING_LINK: &str = "5*A + G - 5*N <= (9*C + 4*H - 9*R) / 4";

fn strategy(count: usize) -> SampleStrategy {
    SampleStrategy::default().with_count(count).unwrap()
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let s = strategy(50_000);
    let tol = Tolerance::default();
    let rels: Vec<_> =
        ["G <= A", "A >= C", "3*N == 2*A + G", FAILING_LINK].iter().map(|t| parse_relation(t).unwrap()).collect();
    let run = || {
        let verdicts: Vec<_> = rels.iter().map(|r| verify_relation(r, &s, &tol).unwrap()).collect();
        let cex: Vec<_> = rels.iter().map(|r| counterexample_search(r, &s, &tol).unwrap()).collect();
        (verdicts, cex, weighted_survey(&s))
    };
    let one = in_pool(1, run);
    let four = in_pool(4, run);
    assert_eq!(one.0, four.0);
    assert_eq!(one.1, four.1);
    assert_eq!(one.2, four.2);
}

#[test]
fn samples_are_reproducible_and_in_range() {
    let s = strategy(10_000);
    let xs = s.samples();
    assert_eq!(xs, s.samples());
    assert_ne!(xs, s.with_seed(7).samples());
    assert!(xs.iter().all(|&x| (1e-6..=1e6).contains(&x)));
    let near = xs.iter().filter(|&&x| (x - 1.0).abs() <= NEAR_ONE_HALF_WIDTH).count();
    assert!(near >= 2000, "{near}");
}

#[test]
fn built_in_suites_at_reduced_size() {
    let s = strategy(20_000);
    let tol = Tolerance::default();
    for suite in Suite::ALL {
        for v in run_suite(suite, &s, &tol).unwrap() {
            let expected = !(suite == Suite::RefinedChain && v.relation.pretty() == FAILING_LINK);
            assert_eq!(v.holds, expected, "{suite}: {} {:?}", v.relation, v.witness);
        }
    }
}

#[test]
fn difference_bounds_are_tight_near_one() {
    let s = strategy(20_000);
    for v in run_suite(Suite::DifferenceBounds, &s, &Tolerance::default()).unwrap() {
        let x = v.tight_at.expect("inequality").get();
        assert!((x - 1.0).abs() <= 1e-2, "{}: tight at {x}", v.relation);
    }
}

#[test]
fn failing_link_has_a_witness_in_the_tails() {
    let rel = parse_relation(FAILING_LINK).unwrap();
    let c = counterexample_search(&rel, &strategy(20_000), &Tolerance::default()).unwrap().expect("violation");
    let x = c.witness.a() / c.witness.b();
    assert!(!(0.03..=30.0).contains(&x), "{x}");
    assert!(c.violation > 0.0);
    assert!(counterexample_search(&parse_relation("G <= A").unwrap(), &strategy(20_000), &Tolerance::default())
        .unwrap()
        .is_none());
}

#[test]
fn weighted_gaps_coincide_across_samples() {
    let w = weighted_survey(&strategy(20_000));
    assert!(w.max_spread <= 1e-10, "{w:?}");
    assert!((w.ratio_mean - 0.125).abs() <= 1e-12, "{w:?}");
    assert!(w.ratio_stdev <= 1e-10, "{w:?}");
}
