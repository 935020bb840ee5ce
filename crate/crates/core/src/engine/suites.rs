use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::sampling::SampleStrategy;
use super::verify::{verify_relation, Tolerance, Verdict};
use crate::dsl::{parse_suite, Relation};
use crate::error::{Error, Result};
use crate::means::PositivePair;

/// The built-in relation collections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    /// All 21 pairwise comparisons in `H <= G <= N <= A <= R <= S <= C`.
    MeanChain,
    /// Proportionalities between differences and linear relations among means.
    Identities,
    /// The thirteen weighted bounds between convex differences.
    DifferenceBounds,
    /// The same bounds restated as comparisons of mean combinations.
    EquivalentForms,
    /// A refinement of the mean chain with intermediate combinations.
    RefinedChain,
    /// Row orderings of the difference pyramids.
    Pyramids,
    /// The chain of five weighted differences and its equal gaps.
    WeightedChain,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::MeanChain,
        Suite::Identities,
        Suite::DifferenceBounds,
        Suite::EquivalentForms,
        Suite::RefinedChain,
        Suite::Pyramids,
        Suite::WeightedChain,
    ];

    /// Name used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            Suite::MeanChain => "eq2",
            Suite::Identities => "identities",
            Suite::DifferenceBounds => "theorem31",
            Suite::EquivalentForms => "remark31",
            Suite::RefinedChain => "prop30",
            Suite::Pyramids => "pyramids",
            Suite::WeightedChain => "eq33",
        }
    }

    /// The embedded relation file.
    pub fn source(self) -> &'static str {
        match self {
            Suite::MeanChain => include_str!("../../suites/eq2.txt"),
            Suite::Identities => include_str!("../../suites/identities.txt"),
            Suite::DifferenceBounds => include_str!("../../suites/theorem31.txt"),
            Suite::EquivalentForms => include_str!("../../suites/remark31.txt"),
            Suite::RefinedChain => include_str!("../../suites/prop30.txt"),
            Suite::Pyramids => include_str!("../../suites/pyramids.txt"),
            Suite::WeightedChain => include_str!("../../suites/eq33.txt"),
        }
    }

    pub fn relations(self) -> Vec<Relation> {
        parse_suite(self.source()).unwrap_or_else(|e| panic!("embedded suite {} is malformed: {e}", self.name()))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidStrategy(format!("unknown suite '{s}'")))
    }
}

/// Runs every relation of `suite`, in file order.
pub fn run_suite(suite: Suite, strategy: &SampleStrategy, tol: &Tolerance) -> Result<Vec<Verdict>> {
    suite.relations().iter().map(|r| verify_relation(r, strategy, tol)).collect()
}

/// Comparisons between alternatives grouped together in the refined chain.
/// Their order is not claimed, so they are reported rather than judged.
pub fn refined_chain_group_relations() -> Vec<Relation> {
    parse_suite(include_str!("../../suites/prop30_groups.txt")).expect("embedded group file parses")
}

/// How often a descriptive comparison holds on a sample set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupComparison {
    pub relation: Relation,
    /// Share of evaluated points where it holds within tolerance.
    pub fraction_holding: f64,
    /// A point where it fails, if any.
    pub counterpoint: Option<PositivePair>,
}

pub fn refined_chain_group_comparisons(strategy: &SampleStrategy, tol: &Tolerance) -> Result<Vec<GroupComparison>> {
    refined_chain_group_relations()
        .into_iter()
        .map(|r| {
            let v = verify_relation(&r, strategy, tol)?;
            Ok(GroupComparison {
                fraction_holding: 1.0 - v.violations as f64 / v.points as f64,
                counterpoint: v.witness,
                relation: r,
            })
        })
        .collect()
}

/// One line of a machine-readable report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub suite: String,
    pub relation: String,
    pub holds: bool,
    pub worst_violation: f64,
    pub witness: Option<PositivePair>,
    pub tight_at: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl Record {
    pub fn new(suite: &str, verdict: &Verdict, seed: u64) -> Self {
        Self {
            suite: suite.to_string(),
            relation: verdict.relation.pretty(),
            holds: verdict.holds,
            worst_violation: verdict.worst_violation,
            witness: verdict.witness,
            tight_at: verdict.tight_at.map(|x| x.get()),
            samples: verdict.samples,
            seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_parse_with_expected_sizes() {
        let sizes: Vec<usize> = Suite::ALL.iter().map(|s| s.relations().len()).collect();
        assert_eq!(sizes, vec![21, 15, 14, 12, 20, 10, 3]);
        assert_eq!(refined_chain_group_relations().len(), 4);
    }

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("eq99".parse::<Suite>().is_err());
    }
}
