//! The seven classical two-argument means, the Gini family, mean
//! differences and the two divergence measures built from them.
//!
//! Every mean here is homogeneous of degree one, so each is evaluated on the
//! pair scaled by `m = max(a, b)` and the result multiplied back by `m`. This
//! keeps squares from overflowing anywhere on the finite positive range.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dd::Real;
use crate::error::{Error, Result};

/// An input point `(a, b)` with both coordinates finite and strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivePair {
    a: f64,
    b: f64,
}

impl PositivePair {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(a) && ok(b) {
            Ok(Self { a, b })
        } else {
            Err(Error::InvalidPair { a, b })
        }
    }

    pub fn a(self) -> f64 {
        self.a
    }

    pub fn b(self) -> f64 {
        self.b
    }

    /// The normalized argument `a / b`.
    pub fn ratio(self) -> f64 {
        self.a / self.b
    }

    pub fn swapped(self) -> Self {
        Self { a: self.b, b: self.a }
    }
}

/// `x = a / b`, finite and strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct NormalizedArg(f64);

impl NormalizedArg {
    pub fn new(x: f64) -> Result<Self> {
        if x.is_finite() && x > 0.0 {
            Ok(Self(x))
        } else {
            Err(Error::InvalidArgument(x))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// The seven means, declared in chain order `H < G < N < A < R < S < C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MeanKind {
    Harmonic,
    Geometric,
    Heronian,
    Arithmetic,
    Centroidal,
    RootMeanSquare,
    ContraHarmonic,
}

impl MeanKind {
    /// All seven, smallest first.
    pub const CHAIN: [MeanKind; 7] = [
        MeanKind::Harmonic,
        MeanKind::Geometric,
        MeanKind::Heronian,
        MeanKind::Arithmetic,
        MeanKind::Centroidal,
        MeanKind::RootMeanSquare,
        MeanKind::ContraHarmonic,
    ];

    pub fn symbol(self) -> char {
        match self {
            MeanKind::Harmonic => 'H',
            MeanKind::Geometric => 'G',
            MeanKind::Heronian => 'N',
            MeanKind::Arithmetic => 'A',
            MeanKind::Centroidal => 'R',
            MeanKind::RootMeanSquare => 'S',
            MeanKind::ContraHarmonic => 'C',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        Self::CHAIN.into_iter().find(|k| k.symbol() == c)
    }

    pub fn name(self) -> &'static str {
        match self {
            MeanKind::Harmonic => "harmonic",
            MeanKind::Geometric => "geometric",
            MeanKind::Heronian => "heronian",
            MeanKind::Arithmetic => "arithmetic",
            MeanKind::Centroidal => "centroidal",
            MeanKind::RootMeanSquare => "root-mean-square",
            MeanKind::ContraHarmonic => "contra-harmonic",
        }
    }
}

impl fmt::Display for MeanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl FromStr for MeanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Self::from_symbol(c),
            _ => None,
        }
        .ok_or(Error::Domain { what: "mean symbol", x: f64::NAN })
    }
}

/// Orders `(r, s)` of the Gini mean `E_{r,s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GiniOrder {
    r: f64,
    s: f64,
}

impl GiniOrder {
    pub fn new(r: f64, s: f64) -> Result<Self> {
        if r.is_finite() && s.is_finite() {
            Ok(Self { r, s })
        } else {
            Err(Error::Domain { what: "Gini order", x: if r.is_finite() { s } else { r } })
        }
    }

    pub fn r(self) -> f64 {
        self.r
    }

    pub fn s(self) -> f64 {
        self.s
    }
}

/// Below this gap the `r = s` branch is used.
pub const GINI_EQUAL_ORDER_GAP: f64 = 1e-9;

/// An ordered pair `(upper, lower)` naming the nonnegative difference
/// `D_{UV} = U - V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DifferencePair {
    upper: MeanKind,
    lower: MeanKind,
}

impl DifferencePair {
    pub fn new(upper: MeanKind, lower: MeanKind) -> Result<Self> {
        if upper > lower {
            Ok(Self { upper, lower })
        } else {
            Err(Error::Domain { what: "difference pair (upper must lie above lower)", x: f64::NAN })
        }
    }

    pub fn upper(self) -> MeanKind {
        self.upper
    }

    pub fn lower(self) -> MeanKind {
        self.lower
    }

    /// All 21 pairs, grouped by upper mean in chain order.
    pub fn all() -> Vec<DifferencePair> {
        let mut out = Vec::with_capacity(21);
        for (i, &upper) in MeanKind::CHAIN.iter().enumerate() {
            for &lower in MeanKind::CHAIN[..i].iter().rev() {
                out.push(DifferencePair { upper, lower });
            }
        }
        out
    }

    pub fn label(self) -> String {
        format!("{}{}", self.upper.symbol(), self.lower.symbol())
    }
}

impl fmt::Display for DifferencePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D({},{})", self.upper, self.lower)
    }
}

impl FromStr for DifferencePair {
    type Err = Error;

    /// Accepts the two-letter label, e.g. `"CS"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        let bad = || Error::Domain { what: "difference label", x: f64::NAN };
        let (Some(u), Some(l), None) = (chars.next(), chars.next(), chars.next()) else {
            return Err(bad());
        };
        let upper = MeanKind::from_symbol(u).ok_or_else(bad)?;
        let lower = MeanKind::from_symbol(l).ok_or_else(bad)?;
        DifferencePair::new(upper, lower)
    }
}

/// The pair scaled by its maximum: `(a/m, b/m, (a-b)/m, m)`.
struct Scaled<T> {
    alpha: T,
    beta: T,
    diff: T,
    scale: f64,
}

fn scaled<T: Real>(p: PositivePair) -> Scaled<T> {
    let m = p.a.max(p.b);
    let mm = T::from_f64(m);
    Scaled {
        alpha: T::from_f64(p.a) / mm,
        beta: T::from_f64(p.b) / mm,
        diff: (T::from_f64(p.a) - T::from_f64(p.b)) / mm,
        scale: m,
    }
}

/// `M(a, b) - A(a, b)` on a pair scaled to `max = 1`. Each of these is an
/// exact rewrite with no leading-order cancellation, so differences of two
/// means keep full relative accuracy as `a -> b`.
fn deviation_scaled<T: Real>(kind: MeanKind, s: &Scaled<T>) -> T {
    let half = T::from_f64(0.5);
    let sum = s.alpha + s.beta;
    let d2 = s.diff * s.diff;
    // (a-b)^2 / (a+b) and (sqrt a - sqrt b)^2
    let tri = || d2 / sum;
    let hel2 = || {
        let r = s.diff / (s.alpha.sqrt() + s.beta.sqrt());
        r * r
    };
    match kind {
        MeanKind::Arithmetic => T::from_f64(0.0),
        MeanKind::Harmonic => T::from_f64(0.0) - tri() * half,
        MeanKind::ContraHarmonic => tri() * half,
        MeanKind::Centroidal => tri() / T::from_f64(6.0),
        MeanKind::Geometric => T::from_f64(0.0) - hel2() * half,
        MeanKind::Heronian => T::from_f64(0.0) - hel2() / T::from_f64(6.0),
        MeanKind::RootMeanSquare => {
            let rms = ((s.alpha * s.alpha + s.beta * s.beta) * half).sqrt();
            let am = sum * half;
            d2 / (T::from_f64(4.0) * (rms + am))
        }
    }
}

/// Evaluates `mean(kind, p)`.
pub fn mean(kind: MeanKind, p: PositivePair) -> Result<f64> {
    let s = scaled::<f64>(p);
    let (x, y) = (s.alpha, s.beta);
    let s1 = x + y;
    let s2 = x * x + y * y;
    let prod = x * y;
    // H and G are formed unscaled: x * y underflows for extreme ratios
    let geo = p.a.sqrt() * p.b.sqrt();
    let v = match kind {
        MeanKind::Harmonic => p.a.min(p.b) * (2.0 / (1.0 + x.min(y))),
        MeanKind::Geometric => geo,
        MeanKind::Heronian => s1 / 3.0 * s.scale + geo / 3.0,
        MeanKind::Arithmetic => s1 / 2.0 * s.scale,
        MeanKind::Centroidal => 2.0 * (s2 + prod) / (3.0 * s1) * s.scale,
        MeanKind::RootMeanSquare => (s2 / 2.0).sqrt() * s.scale,
        MeanKind::ContraHarmonic => s2 / s1 * s.scale,
    };
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Domain { what: kind.name(), x: p.ratio() })
    }
}

/// `f_M(x)` with `M(a, b) = b * f_M(a / b)`.
pub fn normalized(kind: MeanKind, x: NormalizedArg) -> f64 {
    let x = x.get();
    match kind {
        MeanKind::Harmonic => 2.0 * x / (x + 1.0),
        MeanKind::Geometric => x.sqrt(),
        MeanKind::Heronian => (x + x.sqrt() + 1.0) / 3.0,
        MeanKind::Arithmetic => (x + 1.0) / 2.0,
        MeanKind::Centroidal => 2.0 * (x * x + x + 1.0) / (3.0 * (x + 1.0)),
        MeanKind::RootMeanSquare => ((x * x + 1.0) / 2.0).sqrt(),
        MeanKind::ContraHarmonic => (x * x + 1.0) / (x + 1.0),
    }
}

/// `D_{UV}(a, b) = U(a, b) - V(a, b) >= 0`.
pub fn difference(d: DifferencePair, p: PositivePair) -> f64 {
    difference_in::<f64>(d, p)
}

/// [`difference`] evaluated in any [`Real`] type.
pub fn difference_in<T: Real>(d: DifferencePair, p: PositivePair) -> T {
    let s = scaled::<T>(p);
    (deviation_scaled(d.upper, &s) - deviation_scaled(d.lower, &s)) * T::from_f64(s.scale)
}

/// `f_{UV}(x) = f_U(x) - f_V(x)`, evaluated through the stable deviations.
pub fn normalized_difference(d: DifferencePair, x: NormalizedArg) -> f64 {
    // (x, 1) is always a valid pair for a valid x
    difference(d, PositivePair { a: x.get(), b: 1.0 })
}

/// Triangular discrimination `(a - b)^2 / (a + b)`.
pub fn triangular_discrimination(p: PositivePair) -> f64 {
    triangular_discrimination_in::<f64>(p)
}

pub fn triangular_discrimination_in<T: Real>(p: PositivePair) -> T {
    let s = scaled::<T>(p);
    s.diff * s.diff / (s.alpha + s.beta) * T::from_f64(s.scale)
}

/// Hellinger distance `(sqrt a - sqrt b)^2 / 2`.
pub fn hellinger(p: PositivePair) -> f64 {
    hellinger_in::<f64>(p)
}

pub fn hellinger_in<T: Real>(p: PositivePair) -> T {
    let s = scaled::<T>(p);
    let r = s.diff / (s.alpha.sqrt() + s.beta.sqrt());
    r * r * T::from_f64(0.5) * T::from_f64(s.scale)
}

fn log_sum_exp(u: f64, v: f64) -> f64 {
    let hi = u.max(v);
    hi + (-(u - v).abs()).exp().ln_1p()
}

/// The Gini mean
///
/// ```text
/// E_{r,s}(a,b) = ((a^r + b^r) / (a^s + b^s))^(1/(r-s))       r != s
///              = sqrt(ab)                                    r = s = 0
///              = exp((a^r ln a + b^r ln b) / (a^r + b^r))     r = s != 0
/// ```
///
/// evaluated in the log domain, so no power is ever formed explicitly.
pub fn gini_mean(order: GiniOrder, p: PositivePair) -> f64 {
    let (la, lb) = (p.a.ln(), p.b.ln());
    let (r, s) = (order.r, order.s);
    if (r - s).abs() < GINI_EQUAL_ORDER_GAP {
        let q = 0.5 * (r + s);
        let v = if q == 0.0 {
            p.a.sqrt() * p.b.sqrt()
        } else {
            // softmax weights of (q ln a, q ln b)
            let wa = 1.0 / (1.0 + (q * (lb - la)).exp());
            let wb = 1.0 / (1.0 + (q * (la - lb)).exp());
            (wa * la + wb * lb).exp()
        };
        return v.clamp(p.a.min(p.b), p.a.max(p.b));
    }
    let num = log_sum_exp(r * la, r * lb);
    let den = log_sum_exp(s * la, s * lb);
    let v = ((num - den) / (r - s)).exp();
    // rounding can nudge the result a hair outside [min, max]
    v.clamp(p.a.min(p.b), p.a.max(p.b))
}

impl PartialOrd for GiniOrder {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (self.r, self.s).partial_cmp(&(other.r, other.s))
    }
}
