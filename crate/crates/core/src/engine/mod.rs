//! Sampling-based checking of relations between means.
//!
//! Relations are evaluated at `(x, 1)` for sampled `x = a / b`, with a few
//! spot checks at other scales since every atom is homogeneous of degree one.

mod sampling;
mod suites;
mod verify;
mod weighted;

pub use sampling::{SampleStrategy, CHUNK, NEAR_ONE_HALF_WIDTH};
pub use suites::{
    refined_chain_group_comparisons, refined_chain_group_relations, run_suite, GroupComparison, Record, Suite,
};
pub use verify::{
    counterexample_search, verify_relation, Counterexample, Tolerance, Verdict, REFINE_HALF_WIDTH, REFINE_ITERATIONS,
    SPOT_CHECK_SAMPLES, SPOT_CHECK_SCALES,
};
pub use weighted::{
    quartic, w_atoms, weighted_gaps, weighted_survey, WeightedGaps, WeightedSurvey, GAP_WEIGHTS, SPREAD_FLOOR,
};
