//! Sharp constants for weighted inequalities between mean differences.
//!
//! For two convex differences with `f(1) = f'(1) = 0` and a strictly convex
//! denominator, `D_num <= beta * D_den` holds for every pair whenever
//! `beta >= sup_x f_num''(x) / f_den''(x)`. The smallest admissible `beta` is
//! `sup D_num / D_den`, which tends to the curvature ratio at `x = 1`.
//!
//! Both suprema are measured here. When the curvature-ratio supremum sits at
//! `x = 1` the two coincide; otherwise only the difference-ratio supremum is
//! the sharp constant and the inequality needs a direct argument, which is
//! what the auxiliary functions at the bottom of this module certify.

use std::cell::RefCell;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::curvature::{self, Convexity, CurvatureGrid};
use crate::dd::{DoubleDouble, Real};
use crate::error::{Error, Result};
use crate::means::{self, DifferencePair, MeanKind, NormalizedArg, PositivePair};
use crate::optimize::{golden_max, grid_scan};

/// Probe range for suprema, in `x = a / b`.
pub const PROBE_RANGE: (f64, f64) = (1e-6, 1e6);
pub const PROBE_POINTS: usize = 10_000;
pub const GOLDEN_ITERATIONS: usize = 64;
pub const GOLDEN_TOLERANCE: f64 = 1e-12;

/// `g(x) = f_num''(x) / f_den''(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatioSpec {
    numerator: DifferencePair,
    denominator: DifferencePair,
}

impl RatioSpec {
    /// Fails unless the denominator has strictly positive curvature on the
    /// standard grid.
    pub fn new(numerator: DifferencePair, denominator: DifferencePair) -> Result<Self> {
        let cert = curvature::convexity_certify(denominator, &CurvatureGrid::default());
        if cert.verdict != Convexity::Convex || cert.min_curvature <= 0.0 {
            return Err(Error::Domain { what: "ratio denominator (not strictly convex)", x: f64::NAN });
        }
        Ok(Self { numerator, denominator })
    }

    /// Parses `"SA/SN"`.
    pub fn parse(label: &str) -> Result<Self> {
        let (n, d) = label.split_once('/').ok_or(Error::Domain { what: "ratio label", x: f64::NAN })?;
        Self::new(n.trim().parse()?, d.trim().parse()?)
    }

    pub fn numerator(self) -> DifferencePair {
        self.numerator
    }

    pub fn denominator(self) -> DifferencePair {
        self.denominator
    }

    pub fn label(self) -> String {
        format!("{}/{}", self.numerator.label(), self.denominator.label())
    }
}

impl fmt::Display for RatioSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Curvature ratio `g(x)`.
pub fn ratio(spec: RatioSpec, x: NormalizedArg) -> Result<f64> {
    curvature_ratio_at(spec, x.get())
}

fn curvature_ratio_at(spec: RatioSpec, x: f64) -> Result<f64> {
    let den = curvature::difference_curvature_at(spec.denominator, x);
    if den.abs() <= 1e-300 {
        return Err(Error::Domain { what: "curvature ratio (denominator underflow)", x });
    }
    let g = curvature::difference_curvature_at(spec.numerator, x) / den;
    if g.is_finite() {
        Ok(g)
    } else {
        Err(Error::Domain { what: "curvature ratio", x })
    }
}

/// `D_num(x, 1) / D_den(x, 1)`, continued by its limit `g(1)` at `x = 1`.
pub fn difference_ratio(spec: RatioSpec, x: NormalizedArg) -> Result<f64> {
    difference_ratio_at(spec, x.get())
}

fn difference_ratio_at(spec: RatioSpec, x: f64) -> Result<f64> {
    let den = means::normalized_difference(spec.denominator, NormalizedArg::new(x)?);
    if den == 0.0 {
        return curvature_ratio_at(spec, 1.0);
    }
    let r = means::normalized_difference(spec.numerator, NormalizedArg::new(x)?) / den;
    if r.is_finite() {
        Ok(r)
    } else {
        Err(Error::Domain { what: "difference ratio", x })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpConstant {
    pub spec: RatioSpec,
    /// `sup_x D_num / D_den`: the smallest `beta` with `D_num <= beta D_den`.
    pub beta: f64,
    pub argmax: NormalizedArg,
    /// The curvature ratio's discrete slope changes sign exactly once.
    pub unimodal: bool,
    /// `sup_x g(x)` and where it is attained.
    pub curvature_sup: f64,
    pub curvature_argmax: NormalizedArg,
    /// The curvature-ratio supremum already equals `beta`.
    pub lemma_applies: bool,
}

/// Supremum over `x` in [`PROBE_RANGE`], searched in `ln x`: a grid scan in
/// `f64`, then golden-section refinement with comparisons in `V`.
fn log_sup<V: Real, F: Fn(f64) -> Result<V>>(f: F) -> Result<(f64, f64, usize)> {
    let (lo, hi) = (PROBE_RANGE.0.ln(), PROBE_RANGE.1.ln());
    // surface the first failure with its argument
    let failure = RefCell::new(None);
    let eval = |t: f64| match f(t.exp()) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            V::from_f64(f64::NAN)
        }
    };
    let scan = grid_scan(|t| eval(t).to_f64(), lo, hi, PROBE_POINTS);
    let (t, v) = golden_max(eval, scan.bracket.0, scan.bracket.1, GOLDEN_ITERATIONS, GOLDEN_TOLERANCE);
    let (t, v) = if v >= eval(scan.arg) { (t, v) } else { (scan.arg, eval(scan.arg)) };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok((t.exp(), v.to_f64(), scan.slope_sign_changes))
}

/// [`difference_ratio`] in double-double. Near `x = 1` the ratio is flat to
/// fourth order for some specs, so `f64` cannot resolve where it peaks.
fn difference_ratio_dd(spec: RatioSpec, x: f64) -> Result<DoubleDouble> {
    let p = PositivePair::new(x, 1.0)?;
    let den: DoubleDouble = means::difference_in(spec.denominator, p);
    if den.to_f64() == 0.0 {
        return curvature_ratio_at(spec, 1.0).map(DoubleDouble::from);
    }
    let r = means::difference_in::<DoubleDouble>(spec.numerator, p) / den;
    if r.to_f64().is_finite() {
        Ok(r)
    } else {
        Err(Error::Domain { what: "difference ratio", x })
    }
}

/// Measures the sharp constant of `D_num <= beta D_den`.
pub fn sharp_constant(spec: RatioSpec) -> Result<SharpConstant> {
    let (g_arg, g_sup, g_changes) = log_sup(|x| curvature_ratio_at(spec, x))?;
    let (r_arg, r_sup, _) = log_sup(|x| difference_ratio_dd(spec, x))?;
    Ok(SharpConstant {
        spec,
        beta: r_sup,
        argmax: NormalizedArg::new(r_arg)?,
        unimodal: g_changes == 1,
        curvature_sup: g_sup,
        curvature_argmax: NormalizedArg::new(g_arg)?,
        lemma_applies: g_sup <= r_sup + 1e-9 * r_sup.abs().max(1.0),
    })
}

/// The thirteen weighted inequalities `D_num <= c D_den` between convex mean
/// differences, with their constants.
pub fn difference_bound_constants() -> Vec<(RatioSpec, Ratio<i64>)> {
    const TABLE: [(&str, i64, i64); 13] = [
        ("SA/SN", 3, 4),
        ("SA/SH", 1, 3),
        ("SH/CR", 9, 4),
        ("CR/CN", 4, 7),
        ("CR/SG", 2, 3),
        ("SN/CN", 4, 7),
        ("SN/SG", 2, 3),
        ("CN/CS", 7, 3),
        ("CS/AN", 3, 1),
        ("CN/CG", 7, 9),
        ("SG/RG", 6, 5),
        ("CG/RG", 9, 5),
        ("RG/AN", 5, 1),
    ];
    TABLE.iter().map(|&(label, p, q)| (RatioSpec::parse(label).expect("static table"), Ratio::new(p, q))).collect()
}

/// Specs whose bound follows from the curvature-ratio supremum, i.e. those
/// with `g` increasing on `(0, 1)` and decreasing on `(1, inf)`.
pub fn curvature_certified_specs() -> Vec<RatioSpec> {
    ["SA/SN", "SA/SH", "SH/CR", "CR/CN", "CR/SG", "SN/SG", "CS/AN", "CN/CG", "CG/RG", "RG/AN"]
        .iter()
        .map(|l| RatioSpec::parse(l).expect("static table"))
        .collect()
}

/// Relative and absolute slack used by the sandwich check.
pub const SANDWICH_REL_TOL: f64 = 1e-10;
pub const SANDWICH_ABS_TOL: f64 = 1e-14;

/// Checks `alpha D_den(p) <= D_num(p) <= beta D_den(p)`, with the standard
/// slack `1e-10 * max(|lhs|, |rhs|) + 1e-14 * max(a, b)` on each side.
pub fn sandwich_holds(spec: RatioSpec, alpha: f64, beta: f64, p: PositivePair) -> Result<bool> {
    if !(alpha >= 0.0 && alpha < beta) {
        return Err(Error::Domain { what: "sandwich constants (need 0 <= alpha < beta)", x: alpha });
    }
    let num = means::difference(spec.numerator, p);
    let den = means::difference(spec.denominator, p);
    let abs = SANDWICH_ABS_TOL * p.a().max(p.b());
    let le = |lhs: f64, rhs: f64| lhs - rhs <= SANDWICH_REL_TOL * lhs.abs().max(rhs.abs()) + abs;
    Ok(le(alpha * den, num) && le(num, beta * den))
}

/// Probes `x = exp(+-2^-k)` for `k = 1..=40`, i.e. ever closer to 1, and
/// returns the first `x` where `D_num <= beta D_den` fails.
pub fn sharpness_witness(spec: RatioSpec, beta: f64) -> Option<f64> {
    (1..=40)
        .flat_map(|k| {
            let t = 0.5f64.powi(k);
            [t.exp(), (-t).exp()]
        })
        .find(|&x| {
            let p = PositivePair::new(x, 1.0).expect("x > 0");
            !sandwich_holds(spec, 0.0, beta, p).unwrap_or(true)
        })
}

/// Closed-form auxiliary functions used to certify the directly proven
/// bounds, plus the polynomial identity behind the positivity of
/// `8(x^2+x+1) - 2 sqrt(x)(x+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Auxiliary {
    /// `(x^2+1)^2 sqrt(2x^2+2) - 8 x^{5/2}`
    V1,
    /// `10x^2 + 10 + 4x + 2x^{3/2} + 2 sqrt(x) - 7(x+1) sqrt(2x^2+2)`
    V2,
    /// `4(x^2+1)^2 sqrt(2x^2+2) - (x+1)^5`
    V3a,
    /// `8(x^2+x+1) - 2 sqrt(x)(x+1) - 5(x+1) sqrt(2x^2+2)`
    V3b,
    /// Squared-sides difference for `V2`.
    H2,
    /// Squared-sides difference for `V3b`.
    H3,
    /// `[4(x^2+x+1)]^2 - [sqrt(x)(x+1)]^2`
    QuarticSum,
}

impl Auxiliary {
    pub const ALL: [Auxiliary; 7] = [
        Auxiliary::V1,
        Auxiliary::V2,
        Auxiliary::V3a,
        Auxiliary::V3b,
        Auxiliary::H2,
        Auxiliary::H3,
        Auxiliary::QuarticSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Auxiliary::V1 => "v1",
            Auxiliary::V2 => "v2",
            Auxiliary::V3a => "v3a",
            Auxiliary::V3b => "v3b",
            Auxiliary::H2 => "h2",
            Auxiliary::H3 => "h3",
            Auxiliary::QuarticSum => "quartic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxiliaryValue {
    pub value: f64,
    /// `|direct - alternative form|`.
    pub residual: f64,
}

/// Evaluates `aux` directly and against an independent rewrite: the printed
/// factorization for `h2`, `h3` and the quartic; the power-difference form
/// for `v1`, `v3a`; the mean-based form for `v2`, `v3b`.
pub fn auxiliary_check(aux: Auxiliary, x: NormalizedArg) -> AuxiliaryValue {
    let x = x.get();
    let sx = x.sqrt();
    let x32 = x * sx;
    let q = x * x + 1.0;
    let root = (2.0 * q).sqrt();
    let rms = (q / 2.0).sqrt();
    let am = (x + 1.0) / 2.0;
    let nx = NormalizedArg::new(x).expect("x > 0");
    let f = |k| means::normalized(k, nx);
    use MeanKind::*;

    let (value, other) = match aux {
        Auxiliary::V1 => (q * q * root - 8.0 * x * x * sx, 8.0 * (rms.powi(5) - sx.powi(5))),
        Auxiliary::V3a => (4.0 * q * q * root - (x + 1.0).powi(5), 32.0 * (rms.powi(5) - am.powi(5))),
        Auxiliary::V2 => {
            let direct = 10.0 * x * x + 10.0 + 4.0 * x + 2.0 * x32 + 2.0 * sx - 7.0 * (x + 1.0) * root;
            // 14 (x+1) (4/7 f_CN - f_SN) = 2 (x+1) (4 f_C + 3 f_N - 7 f_S)
            let via_means = 2.0 * (x + 1.0) * (4.0 * f(ContraHarmonic) + 3.0 * f(Heronian) - 7.0 * f(RootMeanSquare));
            (direct, via_means)
        }
        Auxiliary::V3b => {
            let direct = 8.0 * (x * x + x + 1.0) - 2.0 * sx * (x + 1.0) - 5.0 * (x + 1.0) * root;
            // 10 (x+1) (6/5 f_RG - f_SG) = 2 (x+1) (6 f_R - f_G - 5 f_S)
            let via_means = 2.0 * (x + 1.0) * (6.0 * f(Centroidal) - f(Geometric) - 5.0 * f(RootMeanSquare));
            (direct, via_means)
        }
        Auxiliary::H2 => {
            let lhs = 10.0 * x * x + 10.0 + 4.0 * x + 2.0 * x32 + 2.0 * sx;
            let rhs = 7.0 * (x + 1.0) * root;
            let factored = (2.0 * x * x + 48.0 * x32 + 68.0 * x + 48.0 * sx + 2.0) * (sx - 1.0).powi(4);
            (lhs * lhs - rhs * rhs, factored)
        }
        Auxiliary::H3 => {
            let lhs = 8.0 * (x * x + x + 1.0) - 2.0 * sx * (x + 1.0);
            let rhs = 5.0 * (x + 1.0) * root;
            let factored = (14.0 * x * x + 24.0 * x32 + 44.0 * x + 24.0 * sx + 14.0) * (sx - 1.0).powi(4);
            (lhs * lhs - rhs * rhs, factored)
        }
        Auxiliary::QuarticSum => {
            let lhs = 4.0 * (x * x + x + 1.0);
            let rhs = sx * (x + 1.0);
            let poly = (((16.0 * x + 31.0) * x + 46.0) * x + 31.0) * x + 16.0;
            (lhs * lhs - rhs * rhs, poly)
        }
    };
    AuxiliaryValue { value, residual: (value - other).abs() }
}
