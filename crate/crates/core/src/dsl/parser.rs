//! Lexer and recursive-descent parser.

use num_rational::Ratio;

use super::{Atom, Expr, ParseError, ParseErrorKind, Rational, RelOp, Relation};
use crate::means::{DifferencePair, MeanKind};

/// Result of [`parse`]: either a bare expression or a relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parsed {
    Expr(Expr),
    Relation(Relation),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Ident(String),
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Rel(RelOp),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(v) => format!("integer {v}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Rel(op) => format!("'{}'", op.symbol()),
            Tok::End => "end of input".into(),
        }
    }
}

const EXPECT_FACTOR: &[&str] = &["integer", "mean", "'Delta'", "'hel'", "'D'", "'Gini'", "'('"];
const EXPECT_OPERATOR: &[&str] = &["'+'", "'-'", "'*'", "'/'", "'<='", "'>='", "'=='"];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let tok = if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let v = text[start..i].parse::<i64>().map_err(|_| ParseError {
                offset: start,
                kind: ParseErrorKind::Overflow,
                expected: vec![],
            })?;
            toks.push((Tok::Int(v), start));
            continue;
        } else if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            toks.push((Tok::Ident(text[start..i].to_string()), start));
            continue;
        } else {
            let two = bytes.get(i + 1).copied();
            match (c, two) {
                (b'<', Some(b'=')) => Tok::Rel(RelOp::Le),
                (b'>', Some(b'=')) => Tok::Rel(RelOp::Ge),
                (b'=', Some(b'=')) => Tok::Rel(RelOp::Eq),
                (b'(', _) => Tok::LParen,
                (b')', _) => Tok::RParen,
                (b',', _) => Tok::Comma,
                (b'+', _) => Tok::Plus,
                (b'-', _) => Tok::Minus,
                (b'*', _) => Tok::Star,
                (b'/', _) => Tok::Slash,
                _ => {
                    let ch = text[i..].chars().next().expect("non-empty");
                    return Err(ParseError {
                        offset: start,
                        kind: ParseErrorKind::Unexpected(format!("character '{ch}'")),
                        expected: vec![],
                    });
                }
            }
        };
        i += if matches!(tok, Tok::Rel(_)) { 2 } else { 1 };
        toks.push((tok, start));
    }
    toks.push((Tok::End, text.len()));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind: ParseErrorKind::Unexpected(self.peek().describe()),
            expected: expected.to_vec(),
        }
    }

    fn error(&self, offset: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { offset, kind, expected: vec![] }
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[name]))
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.factor(true)?;
        loop {
            let is_mul = match self.peek() {
                Tok::Star => true,
                Tok::Slash => false,
                _ => return Ok(lhs),
            };
            self.bump();
            let at = self.offset();
            let rhs = self.factor(false)?;
            if is_mul {
                if !lhs.is_constant() && !rhs.is_constant() {
                    return Err(self.error(at, ParseErrorKind::Nonlinear));
                }
                lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
            } else {
                if !rhs.is_constant() {
                    return Err(self.error(at, ParseErrorKind::Nonlinear));
                }
                match rhs.constant_value() {
                    None => return Err(self.error(at, ParseErrorKind::Overflow)),
                    Some(v) if v == Ratio::from_integer(0) => {
                        return Err(self.error(at, ParseErrorKind::DivisionByZero))
                    }
                    Some(_) => {}
                }
                lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
            }
        }
    }

    /// `head` marks the first factor of a term, the only place where
    /// `p/q` reads as a single literal.
    fn factor(&mut self, head: bool) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(p) => {
                self.bump();
                if head && *self.peek() == Tok::Slash {
                    if let Tok::Int(q) = *self.peek_at(1) {
                        self.bump();
                        let at = self.offset();
                        self.bump();
                        if q == 0 {
                            return Err(self.error(at, ParseErrorKind::DivisionByZero));
                        }
                        return Ok(Expr::Num(Ratio::new(p, q)));
                    }
                }
                Ok(Expr::Num(Ratio::from_integer(p)))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    let mut expected = vec!["')'"];
                    expected.extend_from_slice(&EXPECT_OPERATOR[..4]);
                    return Err(self.unexpected(&expected));
                }
                self.bump();
                Ok(e)
            }
            Tok::Ident(name) => self.atom(&name).map(Expr::Atom),
            _ => Err(self.unexpected(EXPECT_FACTOR)),
        }
    }

    fn atom(&mut self, name: &str) -> PResult<Atom> {
        let mut chars = name.chars();
        if let (Some(c), None) = (chars.next(), chars.next()) {
            if let Some(k) = MeanKind::from_symbol(c) {
                self.bump();
                return Ok(Atom::Mean(k));
            }
        }
        match name {
            "Delta" => {
                self.bump();
                Ok(Atom::Delta)
            }
            "hel" => {
                self.bump();
                Ok(Atom::Hellinger)
            }
            "D" => {
                self.bump();
                self.expect(Tok::LParen, "'('")?;
                let at = self.offset();
                let u = self.mean_symbol()?;
                self.expect(Tok::Comma, "','")?;
                let v = self.mean_symbol()?;
                self.expect(Tok::RParen, "')'")?;
                DifferencePair::new(u, v)
                    .map(Atom::Diff)
                    .map_err(|_| self.error(at, ParseErrorKind::BadDifference(u.symbol(), v.symbol())))
            }
            "Gini" => {
                self.bump();
                self.expect(Tok::LParen, "'('")?;
                let r = self.signed_rational()?;
                self.expect(Tok::Comma, "','")?;
                let s = self.signed_rational()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Atom::Gini(r, s))
            }
            _ => Err(self.unexpected(EXPECT_FACTOR)),
        }
    }

    fn mean_symbol(&mut self) -> PResult<MeanKind> {
        if let Tok::Ident(s) = self.peek() {
            let mut chars = s.chars();
            if let (Some(c), None) = (chars.next(), chars.next()) {
                if let Some(k) = MeanKind::from_symbol(c) {
                    self.bump();
                    return Ok(k);
                }
            }
        }
        Err(self.unexpected(&["mean"]))
    }

    fn signed_rational(&mut self) -> PResult<Rational> {
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.bump();
        }
        let Tok::Int(p) = *self.peek() else {
            return Err(self.unexpected(if negative { &["integer"] } else { &["'-'", "integer"] }));
        };
        self.bump();
        let mut q = 1;
        if *self.peek() == Tok::Slash {
            self.bump();
            let Tok::Int(d) = *self.peek() else {
                return Err(self.unexpected(&["integer"]));
            };
            if d == 0 {
                return Err(self.error(self.offset(), ParseErrorKind::DivisionByZero));
            }
            self.bump();
            q = d;
        }
        Ok(Ratio::new(if negative { -p } else { p }, q))
    }

    fn finish<T>(&self, value: T, expected: &[&'static str]) -> PResult<T> {
        if *self.peek() == Tok::End {
            Ok(value)
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn relation_tail(&mut self, first: Expr) -> PResult<Relation> {
        let mut links = Vec::new();
        while let Tok::Rel(op) = *self.peek() {
            self.bump();
            links.push((op, self.expr()?));
        }
        if links.is_empty() {
            return Err(self.unexpected(EXPECT_OPERATOR));
        }
        Ok(Relation::new(first, links))
    }
}

fn parser(text: &str) -> PResult<Parser> {
    Ok(Parser { toks: lex(text)?, pos: 0 })
}

/// Parses a bare expression.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = parser(text)?;
    let e = p.expr()?;
    p.finish(e, &EXPECT_OPERATOR[..4])
}

/// Parses a relation such as `H <= G <= A` or `3*N == 2*A + G`.
pub fn parse_relation(text: &str) -> Result<Relation, ParseError> {
    let mut p = parser(text)?;
    let first = p.expr()?;
    let r = p.relation_tail(first)?;
    p.finish(r, EXPECT_OPERATOR)
}

/// Parses either form.
pub fn parse(text: &str) -> Result<Parsed, ParseError> {
    let mut p = parser(text)?;
    let first = p.expr()?;
    if matches!(p.peek(), Tok::Rel(_)) {
        let r = p.relation_tail(first)?;
        p.finish(Parsed::Relation(r), EXPECT_OPERATOR)
    } else {
        p.finish(Parsed::Expr(first), EXPECT_OPERATOR)
    }
}

/// Parses a suite file: one relation per line, `#` starts a comment.
/// Error offsets are relative to the whole text.
pub fn parse_suite(text: &str) -> Result<Vec<Relation>, ParseError> {
    let mut out = Vec::new();
    let mut line_start = 0;
    for line in text.split_inclusive('\n') {
        let body = line.trim_end_matches(['\n', '\r']).split('#').next().unwrap_or("");
        if !body.trim().is_empty() {
            let r = parse_relation(body).map_err(|e| ParseError { offset: e.offset + line_start, ..e })?;
            out.push(r);
        }
        line_start += line.len();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonlinear_product_is_rejected() {
        let e = parse_relation("A * G <= S").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Nonlinear);
        assert_eq!(e.offset, 4);
        assert_eq!(parse_expr("A / G").unwrap_err().kind, ParseErrorKind::Nonlinear);
        assert_eq!(parse_expr("(A + 1) * (2 - G)").unwrap_err().kind, ParseErrorKind::Nonlinear);
        // constant subexpressions are literals
        assert!(parse_expr("(1 + 2) * A / (3 - 1)").is_ok());
    }

    #[test]
    fn difference_order_is_checked() {
        assert!(parse_expr("D(S,A)").is_ok());
        let e = parse_expr("D(A,S)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::BadDifference('A', 'S'));
        assert_eq!(e.offset, 2);
        assert!(parse_expr("D(A,A)").is_err());
    }

    #[test]
    fn rational_literals_stay_exact() {
        let r = parse_relation("D(S,A) <= 3/4 * D(S,N)").unwrap();
        let (_, op, rhs) = r.comparisons().next().unwrap();
        assert_eq!(op, RelOp::Le);
        let Expr::Mul(c, _) = rhs else { panic!("{rhs:?}") };
        assert_eq!(**c, Expr::num(3, 4));
        // outside the head of a term '/' divides
        assert_eq!(
            parse_expr("A*3/4").unwrap(),
            Expr::Div(
                Box::new(Expr::Mul(Box::new(Expr::mean(MeanKind::Arithmetic)), Box::new(Expr::num(3, 1)))),
                Box::new(Expr::num(4, 1)),
            )
        );
    }

    #[test]
    fn errors_report_position_and_expectation() {
        let e = parse_relation("A <= ").unwrap_err();
        assert_eq!(e.offset, 5);
        assert!(e.expected.contains(&"'('"));
        let e = parse_expr("A $ G").unwrap_err();
        assert_eq!(e.offset, 2);
        assert_eq!(parse_expr("1/0").unwrap_err().kind, ParseErrorKind::DivisionByZero);
        assert_eq!(parse_expr("A / (1 - 1)").unwrap_err().kind, ParseErrorKind::DivisionByZero);
        assert_eq!(parse_expr("99999999999999999999").unwrap_err().kind, ParseErrorKind::Overflow);
        assert!(parse_relation("A").is_err());
        assert!(parse_expr("A <= G").is_err());
        assert!(parse_expr("Gini(1,").is_err());
        assert!(parse_expr("Q").is_err());
    }

    #[test]
    fn generic_parse_distinguishes_forms() {
        assert!(matches!(parse("A + G").unwrap(), Parsed::Expr(_)));
        assert!(matches!(parse("A >= G").unwrap(), Parsed::Relation(_)));
    }

    #[test]
    fn suite_files_skip_comments() {
        let text = "# header\nH <= G\n\n  A >= G  # trailing\n";
        assert_eq!(parse_suite(text).unwrap().len(), 2);
        let e = parse_suite("H <= G\nA >= \n").unwrap_err();
        assert_eq!(e.offset, 12);
    }
}
