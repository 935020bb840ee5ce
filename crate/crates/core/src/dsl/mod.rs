//! A small language for linear relations between means.
//!
//! ```text
//! relation := expr (('<=' | '>=' | '==') expr)+
//! expr     := term (('+' | '-') term)*
//! term     := factor (('*' | '/') factor)*      at most one factor may mention an atom
//! factor   := rational | atom | '(' expr ')'
//! atom     := 'H' | 'G' | 'N' | 'A' | 'R' | 'S' | 'C' | 'Delta' | 'hel'
//!           | 'D' '(' mean ',' mean ')' | 'Gini' '(' signed ',' signed ')'
//! rational := integer ('/' integer)?           only as the first factor of a term
//! ```
//!
//! Literals stay exact until evaluation. Divisors must be constant and
//! nonzero; `D(U,V)` requires `U` above `V` in `H < G < N < A < R < S < C`.

mod parser;

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::error::Result;
use crate::means::{self, DifferencePair, GiniOrder, MeanKind, PositivePair};

pub use parser::{parse, parse_expr, parse_relation, parse_suite, Parsed};

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Atom {
    Mean(MeanKind),
    Delta,
    Hellinger,
    Diff(DifferencePair),
    Gini(Rational, Rational),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(Rational),
    Atom(Atom),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelOp {
    Le,
    Ge,
    Eq,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Le => "<=",
            RelOp::Ge => ">=",
            RelOp::Eq => "==",
        }
    }
}

/// `e0 op1 e1 op2 e2 ...`; a plain two-sided relation has one link.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    first: Expr,
    links: Vec<(RelOp, Expr)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {kind}{}", expected_suffix(.expected))]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
    pub expected: Vec<&'static str>,
}

fn expected_suffix(expected: &[&'static str]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", expected.join(" or "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected {0}")]
    Unexpected(String),
    #[error("product or quotient of two non-constant factors")]
    Nonlinear,
    #[error("D({0},{1}) needs its first mean above its second")]
    BadDifference(char, char),
    #[error("division by zero")]
    DivisionByZero,
    #[error("integer literal out of range")]
    Overflow,
}

impl Expr {
    pub fn num(p: i64, q: i64) -> Self {
        Expr::Num(Ratio::new(p, q))
    }

    pub fn mean(kind: MeanKind) -> Self {
        Expr::Atom(Atom::Mean(kind))
    }

    /// True when no atom occurs in the expression.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Atom(_) => false,
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) | Expr::Div(l, r) => l.is_constant() && r.is_constant(),
        }
    }

    /// Exact value of an atom-free expression; `None` on overflow, division
    /// by zero, or if an atom is present.
    pub fn constant_value(&self) -> Option<Rational> {
        use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub};
        match self {
            Expr::Num(v) => Some(*v),
            Expr::Atom(_) => None,
            Expr::Add(l, r) => l.constant_value()?.checked_add(&r.constant_value()?),
            Expr::Sub(l, r) => l.constant_value()?.checked_sub(&r.constant_value()?),
            Expr::Mul(l, r) => l.constant_value()?.checked_mul(&r.constant_value()?),
            Expr::Div(l, r) => l.constant_value()?.checked_div(&r.constant_value()?),
        }
    }

    pub fn evaluate(&self, p: PositivePair) -> Result<f64> {
        Ok(match self {
            Expr::Num(v) => rational_to_f64(*v),
            Expr::Atom(a) => a.evaluate(p)?,
            Expr::Add(l, r) => l.evaluate(p)? + r.evaluate(p)?,
            Expr::Sub(l, r) => l.evaluate(p)? - r.evaluate(p)?,
            Expr::Mul(l, r) => l.evaluate(p)? * r.evaluate(p)?,
            Expr::Div(l, r) => l.evaluate(p)? / r.evaluate(p)?,
        })
    }

    /// Canonical text with minimal parentheses; parses back to `self`.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        write_expr(self, &mut out);
        out
    }
}

fn rational_to_f64(v: Rational) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}

impl Atom {
    pub fn evaluate(&self, p: PositivePair) -> Result<f64> {
        Ok(match *self {
            Atom::Mean(k) => means::mean(k, p)?,
            Atom::Delta => means::triangular_discrimination(p),
            Atom::Hellinger => means::hellinger(p),
            Atom::Diff(d) => means::difference(d, p),
            Atom::Gini(r, s) => means::gini_mean(GiniOrder::new(rational_to_f64(r), rational_to_f64(s))?, p),
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Mean(k) => write!(f, "{k}"),
            Atom::Delta => f.write_str("Delta"),
            Atom::Hellinger => f.write_str("hel"),
            Atom::Diff(d) => write!(f, "{d}"),
            Atom::Gini(r, s) => write!(f, "Gini({r},{s})"),
        }
    }
}

fn is_integer(e: &Expr) -> bool {
    matches!(e, Expr::Num(v) if v.is_integer())
}

fn write_expr(e: &Expr, out: &mut String) {
    // left spine of + and -
    let mut spine = Vec::new();
    let mut cur = e;
    while let Expr::Add(l, r) | Expr::Sub(l, r) = cur {
        spine.push((if matches!(cur, Expr::Add(..)) { " + " } else { " - " }, r.as_ref()));
        cur = l;
    }
    write_term(cur, out);
    for (op, t) in spine.into_iter().rev() {
        out.push_str(op);
        if matches!(t, Expr::Add(..) | Expr::Sub(..)) {
            out.push('(');
            write_expr(t, out);
            out.push(')');
        } else {
            write_term(t, out);
        }
    }
}

fn write_term(e: &Expr, out_all: &mut String) {
    let mut term = String::new();
    let out = &mut term;
    let mut spine = Vec::new();
    let mut cur = e;
    while let Expr::Mul(l, r) | Expr::Div(l, r) = cur {
        spine.push((if matches!(cur, Expr::Mul(..)) { " * " } else { " / " }, r.as_ref()));
        cur = l;
    }
    spine.reverse();

    // "3 / 4" at the head of a term would read back as the literal 3/4
    let head_needs_parens = match (cur, spine.first()) {
        (Expr::Num(_), Some((" / ", r))) => is_integer(cur) && is_integer(r),
        _ => false,
    } || matches!(cur, Expr::Add(..) | Expr::Sub(..));
    write_factor(cur, head_needs_parens, out);

    for (op, f) in spine {
        let parens = match f {
            Expr::Num(v) => !v.is_integer(),
            Expr::Atom(_) => false,
            _ => true,
        };
        let mut rhs = String::new();
        write_factor(f, parens, &mut rhs);
        // short products like "2*A" stay tight
        let simple = |t: &str| !t.contains([' ', '/']);
        if op == " * " && simple(out) && simple(&rhs) {
            out.push('*');
        } else {
            out.push_str(op);
        }
        out.push_str(&rhs);
    }
    out_all.push_str(&term);
}

fn write_factor(e: &Expr, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
    }
    match e {
        Expr::Num(v) => out.push_str(&v.to_string()),
        Expr::Atom(a) => out.push_str(&a.to_string()),
        _ => write_expr(e, out),
    }
    if parens {
        out.push(')');
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

impl Relation {
    pub fn new(first: Expr, links: Vec<(RelOp, Expr)>) -> Self {
        assert!(!links.is_empty(), "a relation needs at least one comparison");
        Self { first, links }
    }

    pub fn binary(lhs: Expr, op: RelOp, rhs: Expr) -> Self {
        Self::new(lhs, vec![(op, rhs)])
    }

    pub fn first(&self) -> &Expr {
        &self.first
    }

    pub fn links(&self) -> &[(RelOp, Expr)] {
        &self.links
    }

    /// Adjacent comparisons `(lhs, op, rhs)`.
    pub fn comparisons(&self) -> impl Iterator<Item = (&Expr, RelOp, &Expr)> {
        let lefts = std::iter::once(&self.first).chain(self.links.iter().map(|(_, e)| e));
        lefts.zip(self.links.iter()).map(|(l, (op, r))| (l, *op, r))
    }

    pub fn is_equality(&self) -> bool {
        self.links.iter().all(|(op, _)| *op == RelOp::Eq)
    }

    /// Values of every side, in order.
    pub fn evaluate_sides(&self, p: PositivePair) -> Result<Vec<f64>> {
        std::iter::once(&self.first).chain(self.links.iter().map(|(_, e)| e)).map(|e| e.evaluate(p)).collect()
    }

    pub fn pretty(&self) -> String {
        let mut out = self.first.pretty();
        for (op, e) in &self.links {
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            out.push_str(&e.pretty());
        }
        out
    }
}

impl serde::Serialize for Relation {
    /// Serialized as its canonical text.
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.pretty())
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: f64, b: f64) -> PositivePair {
        PositivePair::new(a, b).unwrap()
    }

    #[test]
    fn evaluates_worked_examples() {
        let e = parse_expr("A").unwrap();
        assert_eq!(e.evaluate(pair(4.0, 9.0)).unwrap(), 6.5);
        let e = parse_expr("2*A + G").unwrap();
        assert!((e.evaluate(pair(4.0, 9.0)).unwrap() - 19.0).abs() < 1e-14);
        let e = parse_expr("Delta").unwrap();
        assert!((e.evaluate(pair(1.0, 3.0)).unwrap() - 1.0).abs() < 1e-15);
        let e = parse_expr("Gini(0,2)").unwrap();
        assert!((e.evaluate(pair(1.0, 7.0)).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn canonical_printing() {
        assert_eq!(parse_relation("3*N==2*A+G").unwrap().pretty(), "3*N == 2*A + G");
        assert_eq!(parse_expr("( A )").unwrap().pretty(), "A");
        assert_eq!(parse_relation("D(C,G) <= 9/5*D(R,G)").unwrap().pretty(), "D(C,G) <= 9/5 * D(R,G)");
        assert_eq!(parse_expr("(2*G+S)/3").unwrap().pretty(), "(2*G + S) / 3");
        assert_eq!(parse_expr("Gini(-1/2, 1/2)").unwrap().pretty(), "Gini(-1/2,1/2)");
    }

    #[test]
    fn awkward_literals_round_trip() {
        let cases = [
            Expr::Div(Box::new(Expr::num(3, 1)), Box::new(Expr::num(4, 1))),
            Expr::Mul(Box::new(Expr::mean(MeanKind::Arithmetic)), Box::new(Expr::num(3, 4))),
            Expr::Div(Box::new(Expr::mean(MeanKind::Arithmetic)), Box::new(Expr::num(3, 4))),
            Expr::Div(Box::new(Expr::num(3, 4)), Box::new(Expr::num(5, 1))),
            Expr::Sub(
                Box::new(Expr::mean(MeanKind::Centroidal)),
                Box::new(Expr::Add(Box::new(Expr::num(1, 1)), Box::new(Expr::mean(MeanKind::Geometric)))),
            ),
        ];
        for e in cases {
            let text = e.pretty();
            assert_eq!(parse_expr(&text).unwrap(), e, "{text}");
        }
    }

    #[test]
    fn chains_compare_adjacent_sides() {
        let r = parse_relation("H <= G <= A").unwrap();
        let cmp: Vec<_> = r.comparisons().map(|(l, op, r)| (l.pretty(), op, r.pretty())).collect();
        assert_eq!(cmp, vec![("H".into(), RelOp::Le, "G".into()), ("G".into(), RelOp::Le, "A".into())]);
        assert!(!r.is_equality());
    }
}
