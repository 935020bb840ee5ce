use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::SampleStrategy;
use crate::dsl::{Expr, RelOp, Relation};
use crate::error::{Error, Result};
use crate::means::{NormalizedArg, PositivePair};

/// Homogeneity spot checks reuse this many leading samples.
pub const SPOT_CHECK_SAMPLES: usize = 1024;
/// Values of `b` used by the spot checks; the main pass uses `b = 1`.
pub const SPOT_CHECK_SCALES: [f64; 2] = [1e-3, 1e3];

/// Steps of interval halving in [`counterexample_search`].
pub const REFINE_ITERATIONS: usize = 50;
/// Half-width, in `ln x`, of the window refined around the worst sample.
pub const REFINE_HALF_WIDTH: f64 = 0.01;

/// `lhs <= rhs` is violated when
/// `lhs - rhs > rel * max(|lhs|, |rhs|) + abs * b`.
/// Equalities use `rel / 100` on `|lhs - rhs|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        if rel.is_finite() && abs.is_finite() && rel >= 0.0 && abs >= 0.0 {
            Ok(Self { rel, abs })
        } else {
            Err(Error::InvalidStrategy(format!("tolerances must be finite and nonnegative, got {rel}, {abs}")))
        }
    }

    pub fn equality_rel(&self) -> f64 {
        self.rel / 100.0
    }

    fn allowance(&self, op: RelOp, lhs: f64, rhs: f64, scale: f64) -> f64 {
        let rel = if op == RelOp::Eq { self.equality_rel() } else { self.rel };
        rel * lhs.abs().max(rhs.abs()) + self.abs * scale
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel: 1e-10, abs: 1e-14 }
    }
}

/// Outcome of checking one relation on a sample set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub relation: Relation,
    pub holds: bool,
    /// Largest amount by which a comparison exceeded its allowance; zero when
    /// the relation holds.
    pub worst_violation: f64,
    /// The point of `worst_violation`, present iff the relation fails.
    pub witness: Option<PositivePair>,
    /// For inequalities, the sample where the sides are relatively closest.
    pub tight_at: Option<NormalizedArg>,
    pub samples: usize,
    /// Evaluated points, spot checks included.
    pub points: usize,
    /// Points with at least one violated comparison.
    pub violations: usize,
    /// Largest `|lhs - rhs| / max(|lhs|, |rhs|)` over equality comparisons.
    pub max_relative_error: f64,
}

/// A relation flattened for fast repeated evaluation.
struct Compiled<'a> {
    sides: Vec<&'a Expr>,
    ops: Vec<RelOp>,
}

#[derive(Debug, Clone, Copy)]
struct Assessment {
    /// Largest `excess - allowance` over the comparisons.
    margin: f64,
    /// Raw excess at that comparison.
    excess: f64,
    /// Smallest relative gap over inequality comparisons.
    gap: Option<f64>,
    rel_error: f64,
}

impl<'a> Compiled<'a> {
    fn new(rel: &'a Relation) -> Self {
        let sides = std::iter::once(rel.first()).chain(rel.links().iter().map(|(_, e)| e)).collect();
        let ops = rel.links().iter().map(|(op, _)| *op).collect();
        Self { sides, ops }
    }

    fn assess(&self, p: PositivePair, tol: &Tolerance, buf: &mut Vec<f64>) -> Result<Assessment> {
        buf.clear();
        for e in &self.sides {
            let v = e
                .evaluate(p)
                .and_then(|v| {
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(Error::Domain { what: "relation side", x: p.ratio() })
                    }
                })
                .map_err(|source| Error::AtSample { a: p.a(), b: p.b(), source: Box::new(source) })?;
            buf.push(v);
        }
        let mut out = Assessment { margin: f64::NEG_INFINITY, excess: 0.0, gap: None, rel_error: 0.0 };
        for (i, &op) in self.ops.iter().enumerate() {
            let (l, r) = (buf[i], buf[i + 1]);
            let size = l.abs().max(r.abs());
            let excess = match op {
                RelOp::Le => l - r,
                RelOp::Ge => r - l,
                RelOp::Eq => (l - r).abs(),
            };
            let margin = excess - tol.allowance(op, l, r, p.b());
            if margin > out.margin {
                out.margin = margin;
                out.excess = excess;
            }
            if op == RelOp::Eq {
                if size > 0.0 {
                    out.rel_error = out.rel_error.max(excess / size);
                }
            } else {
                let gap = if size > 0.0 { -excess / size } else { 0.0 };
                out.gap = Some(out.gap.map_or(gap, |g: f64| g.min(gap)));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy)]
struct Accum {
    points: usize,
    violations: usize,
    worst: Option<(f64, f64, PositivePair)>,
    tight: Option<(f64, f64)>,
    rel_error: f64,
}

impl Accum {
    const EMPTY: Accum = Accum { points: 0, violations: 0, worst: None, tight: None, rel_error: 0.0 };

    fn add(&mut self, p: PositivePair, a: Assessment, track_tight: bool) {
        self.points += 1;
        if a.margin > 0.0 {
            self.violations += 1;
        }
        if self.worst.is_none_or(|(m, _, _)| a.margin > m) {
            self.worst = Some((a.margin, a.excess, p));
        }
        if let (true, Some(g)) = (track_tight, a.gap) {
            if self.tight.is_none_or(|(t, _)| g < t) {
                self.tight = Some((g, p.ratio()));
            }
        }
        self.rel_error = self.rel_error.max(a.rel_error);
    }

    /// Order-sensitive merge: on ties `self` (the earlier range) wins.
    fn merge(mut self, other: Accum) -> Accum {
        self.points += other.points;
        self.violations += other.violations;
        if let Some(w) = other.worst {
            if self.worst.is_none_or(|(m, _, _)| w.0 > m) {
                self.worst = Some(w);
            }
        }
        if let Some(t) = other.tight {
            if self.tight.is_none_or(|(g, _)| t.0 < g) {
                self.tight = Some(t);
            }
        }
        self.rel_error = self.rel_error.max(other.rel_error);
        self
    }
}

fn unit_pair(x: f64) -> PositivePair {
    PositivePair::new(x, 1.0).expect("samples are finite and positive")
}

fn scan(compiled: &Compiled<'_>, strategy: &SampleStrategy, tol: &Tolerance) -> Result<Accum> {
    let partials: Vec<Result<Accum>> = (0..strategy.chunk_count())
        .into_par_iter()
        .map(|k| {
            let mut acc = Accum::EMPTY;
            let mut buf = Vec::with_capacity(compiled.sides.len());
            let start = strategy.chunk_bounds(k).start;
            for (offset, x) in strategy.chunk(k).into_iter().enumerate() {
                let p = unit_pair(x);
                acc.add(p, compiled.assess(p, tol, &mut buf)?, true);
                if start + offset < SPOT_CHECK_SAMPLES {
                    for b in SPOT_CHECK_SCALES {
                        if let Ok(q) = PositivePair::new(x * b, b) {
                            acc.add(q, compiled.assess(q, tol, &mut buf)?, false);
                        }
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    partials.into_iter().try_fold(Accum::EMPTY, |acc, part| Ok(acc.merge(part?)))
}

/// Evaluates `rel` at every sample of `strategy` (with `b = 1`) plus the
/// homogeneity spot checks, and reports the worst violation and tightness.
///
/// The result depends only on the strategy, never on the thread count.
pub fn verify_relation(rel: &Relation, strategy: &SampleStrategy, tol: &Tolerance) -> Result<Verdict> {
    let compiled = Compiled::new(rel);
    let acc = scan(&compiled, strategy, tol)?;
    let (margin, _, at) = acc.worst.expect("at least one sample");
    let holds = margin <= 0.0;
    Ok(Verdict {
        relation: rel.clone(),
        holds,
        worst_violation: if holds { 0.0 } else { margin },
        witness: (!holds).then_some(at),
        tight_at: acc.tight.and_then(|(_, x)| NormalizedArg::new(x).ok()),
        samples: strategy.count(),
        points: acc.points,
        violations: acc.violations,
        max_relative_error: acc.rel_error,
    })
}

/// A violating point and the amount `lhs - rhs` (or `|lhs - rhs|` for an
/// equality) by which the relation fails there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub witness: PositivePair,
    pub violation: f64,
}

/// Random sampling followed by interval halving in `ln x` around the worst
/// sample, keeping the half whose midpoint violates more.
pub fn counterexample_search(
    rel: &Relation,
    strategy: &SampleStrategy,
    tol: &Tolerance,
) -> Result<Option<Counterexample>> {
    let compiled = Compiled::new(rel);
    let partials: Vec<Result<Option<(f64, f64, f64)>>> = (0..strategy.chunk_count())
        .into_par_iter()
        .map(|k| {
            let mut buf = Vec::new();
            let mut best: Option<(f64, f64, f64)> = None;
            for x in strategy.chunk(k) {
                let a = compiled.assess(unit_pair(x), tol, &mut buf)?;
                if best.is_none_or(|(m, _, _)| a.margin > m) {
                    best = Some((a.margin, a.excess, x));
                }
            }
            Ok(best)
        })
        .collect();
    let mut best: Option<(f64, f64, f64)> = None;
    for part in partials {
        if let Some(c) = part? {
            if best.is_none_or(|(m, _, _)| c.0 > m) {
                best = Some(c);
            }
        }
    }
    let Some((mut margin, mut excess, mut x_best)) = best else {
        return Ok(None);
    };

    let (lo, hi) = strategy.range();
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut buf = Vec::new();
    let mut eval = |t: f64| -> Result<(f64, f64, f64)> {
        let x = t.exp().clamp(lo, hi);
        let a = compiled.assess(unit_pair(x), tol, &mut buf)?;
        Ok((a.margin, a.excess, x))
    };
    let centre = x_best.ln();
    let (mut left, mut right) = ((centre - REFINE_HALF_WIDTH).max(llo), (centre + REFINE_HALF_WIDTH).min(lhi));
    for _ in 0..REFINE_ITERATIONS {
        if right <= left {
            break;
        }
        let mid = 0.5 * (left + right);
        let l = eval(0.5 * (left + mid))?;
        let r = eval(0.5 * (mid + right))?;
        let pick = if r.0 > l.0 { r } else { l };
        if r.0 > l.0 {
            left = mid;
        } else {
            right = mid;
        }
        if pick.0 > margin {
            (margin, excess, x_best) = pick;
        }
    }
    Ok((margin > 0.0).then(|| Counterexample { witness: unit_pair(x_best), violation: excess }))
}
