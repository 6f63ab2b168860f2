//! Text input and output for polynomials and problem files.
//!
//! Grammar accepted by [`parse_polynomial`]:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | base ('^' natural)?
//! base   := rational | 'x' | 'y' | '(' expr ')'
//! ```
//!
//! Multiplication is always explicit. Rational literals are `3` or `3/4`.
//! Unary minus binds looser than `^`, so `-x^2` is `-(x^2)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::{Monomial, Polynomial, Rational};

/// Default bound on the total degree of any polynomial built while parsing.
pub const DEFAULT_DEGREE_GUARD: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {position}: {message} (expected {})", .expected.join(" or "))]
pub struct ParseError {
    /// Byte offset into the parsed text.
    pub position: usize,
    pub expected: Vec<String>,
    pub message: String,
}

/// Errors from reading a problem file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error("line {line}: expected `key = expression`")]
    MalformedLine { line: usize },
    #[error("line {line}: unknown key `{key}` (allowed: f1, f2, u)")]
    UnknownKey { line: usize, key: String },
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
}

/// Solver settings carried alongside a problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub oracle_radius: f64,
    pub degree_guard: u32,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            oracle_radius: 16.0,
            degree_guard: DEFAULT_DEGREE_GUARD,
        }
    }
}

/// A map `f = (f1, f2)` and an optional region `{u > 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInput {
    pub f1: Polynomial,
    pub f2: Polynomial,
    pub u: Option<Polynomial>,
    pub options: SolverOptions,
}

impl ProblemInput {
    pub fn new(f1: Polynomial, f2: Polynomial, u: Option<Polynomial>) -> Self {
        ProblemInput {
            f1,
            f2,
            u,
            options: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Token {
    Num(usize, usize),
    X,
    Y,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self, text: &str) -> String {
        match *self {
            Token::Num(s, e) => format!("number `{}`", &text[s..e]),
            Token::X => "`x`".into(),
            Token::Y => "`y`".into(),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Slash => "`/`".into(),
            Token::Caret => "`^`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let tok = match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Token::Num(start, i)));
                continue;
            }
            b'x' => Token::X,
            b'y' => Token::Y,
            b'+' => Token::Plus,
            b'-' => Token::Minus,
            b'*' => Token::Star,
            b'/' => Token::Slash,
            b'^' => Token::Caret,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    position: i,
                    expected: vec!["number".into(), "`x`".into(), "`y`".into(), "operator".into()],
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((i, tok));
        i += 1;
    }
    out.push((text.len(), Token::End));
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<(usize, Token)>,
    pos: usize,
    guard: u32,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Token {
        self.tokens[self.pos].1
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].0
    }

    fn bump(&mut self) -> Token {
        let t = self.peek();
        if t != Token::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            position: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            message: format!("unexpected {}", self.peek().describe(self.text)),
        }
    }

    fn check_degree(&self, p: Polynomial, at: usize) -> Result<Polynomial, ParseError> {
        match p.total_degree() {
            Some(d) if d > self.guard => Err(ParseError {
                position: at,
                expected: vec![format!("degree at most {}", self.guard)],
                message: format!("polynomial of degree {d} exceeds the degree guard"),
            }),
            _ => Ok(p),
        }
    }

    fn natural(&self, start: usize, end: usize) -> BigInt {
        self.text[start..end].parse().expect("lexer only yields digit runs")
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Token::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Token::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let start = self.offset();
        let mut acc = self.factor()?;
        while self.peek() == Token::Star {
            self.bump();
            let rhs = self.factor()?;
            acc = self.check_degree(&acc * &rhs, start)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        if self.peek() == Token::Minus {
            self.bump();
            return Ok(-self.factor()?);
        }
        let start = self.offset();
        let base = self.base()?;
        if self.peek() != Token::Caret {
            return Ok(base);
        }
        self.bump();
        let exp_at = self.offset();
        let Token::Num(s, e) = self.peek() else {
            return Err(self.error(&["natural exponent"]));
        };
        self.bump();
        let n = self.natural(s, e);
        let exp = match u32::try_from(&n) {
            Ok(v) if v <= self.guard => v,
            _ => {
                return Err(ParseError {
                    position: exp_at,
                    expected: vec![format!("exponent at most {}", self.guard)],
                    message: format!("exponent {n} exceeds the degree guard"),
                })
            }
        };
        let degree = base.total_degree().unwrap_or(0).saturating_mul(exp);
        if degree > self.guard {
            return Err(ParseError {
                position: start,
                expected: vec![format!("degree at most {}", self.guard)],
                message: format!("polynomial of degree {degree} exceeds the degree guard"),
            });
        }
        Ok(base.pow(exp))
    }

    fn base(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek() {
            Token::Num(s, e) => {
                self.bump();
                let num = self.natural(s, e);
                if self.peek() != Token::Slash {
                    return Ok(Polynomial::constant(Rational::from_integer(num)));
                }
                self.bump();
                let den_at = self.offset();
                match self.peek() {
                    Token::Num(ds, de) => {
                        self.bump();
                        let den = self.natural(ds, de);
                        if den.is_zero() {
                            return Err(ParseError {
                                position: den_at,
                                expected: vec!["nonzero denominator".into()],
                                message: "division by zero".into(),
                            });
                        }
                        Ok(Polynomial::constant(Rational::new(num, den)))
                    }
                    _ => Err(self.error(&["denominator"])),
                }
            }
            Token::X => {
                self.bump();
                Ok(Polynomial::x())
            }
            Token::Y => {
                self.bump();
                Ok(Polynomial::y())
            }
            Token::LParen => {
                self.bump();
                let inner = self.expr()?;
                if self.peek() != Token::RParen {
                    return Err(self.error(&["`)`", "operator"]));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error(&["number", "`x`", "`y`", "`(`", "`-`"])),
        }
    }
}

/// Parses a polynomial with the default degree guard.
pub fn parse_polynomial(text: &str) -> Result<Polynomial, ParseError> {
    parse_polynomial_with_guard(text, DEFAULT_DEGREE_GUARD)
}

/// Parses a polynomial, rejecting any intermediate of total degree above `guard`.
pub fn parse_polynomial_with_guard(text: &str, guard: u32) -> Result<Polynomial, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        text,
        tokens,
        pos: 0,
        guard,
    };
    let p = parser.expr()?;
    if parser.peek() != Token::End {
        return Err(parser.error(&["operator", "end of input"]));
    }
    Ok(p)
}

/// Parses the line-oriented problem format: `key = expr` per line with keys
/// `f1`, `f2` and optional `u`. `#` starts a comment; blank lines are skipped.
pub fn parse_problem(text: &str) -> Result<ProblemInput, ProblemError> {
    parse_problem_with_options(text, SolverOptions::default())
}

pub fn parse_problem_with_options(
    text: &str,
    options: SolverOptions,
) -> Result<ProblemInput, ProblemError> {
    let mut f1 = None;
    let mut f2 = None;
    let mut u = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some((key, rhs)) = content.split_once('=') else {
            return Err(ProblemError::MalformedLine { line });
        };
        let key = key.trim();
        let slot = match key {
            "f1" => &mut f1,
            "f2" => &mut f2,
            "u" => &mut u,
            _ => {
                return Err(ProblemError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        };
        if slot.is_some() {
            return Err(ProblemError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        // Report positions relative to the whole line.
        let rhs_offset = content.len() - rhs.len();
        let p = parse_polynomial_with_guard(rhs, options.degree_guard).map_err(|mut e| {
            e.position += rhs_offset;
            ProblemError::Parse { line, source: e }
        })?;
        *slot = Some(p);
    }
    let f1 = f1.ok_or_else(|| ProblemError::MissingKey("f1".into()))?;
    let f2 = f2.ok_or_else(|| ProblemError::MissingKey("f2".into()))?;
    Ok(ProblemInput { f1, f2, u, options })
}

/// Graded-lexicographic descending comparison key (x > y).
fn display_key(m: &Monomial) -> (u32, u32) {
    (m.degree(), m.ex)
}

/// Canonical text form: terms in graded-lexicographic descending order,
/// explicit `*`, coefficient 1 omitted. Parses back to the same polynomial.
pub fn format_polynomial(p: &Polynomial) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by_key(|(m, _)| std::cmp::Reverse(display_key(m)));
    let mut out = String::new();
    for (i, (m, c)) in terms.into_iter().enumerate() {
        let negative = c.is_negative();
        if i == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let mag = c.abs();
        if *m == Monomial::ONE {
            write_rational(&mut out, &mag);
        } else if mag.is_one() {
            out.push_str(&m.to_string());
        } else {
            write_rational(&mut out, &mag);
            out.push('*');
            out.push_str(&m.to_string());
        }
    }
    out
}

fn write_rational(out: &mut String, r: &Rational) {
    use fmt::Write;
    if r.denom().is_one() {
        let _ = write!(out, "{}", r.numer());
    } else {
        let _ = write!(out, "{}/{}", r.numer(), r.denom());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::arb_poly;
    use proptest::prelude::*;

    fn p(terms: &[(i64, u32, u32)]) -> Polynomial {
        Polynomial::from_int_terms(terms)
    }

    #[test]
    fn parses_example_map() {
        let f1 = parse_polynomial("x*y^2 - x^2 + y^2 + x - y").unwrap();
        assert_eq!(f1, p(&[(1, 1, 2), (-1, 2, 0), (1, 0, 2), (1, 1, 0), (-1, 0, 1)]));
        assert!(parse_polynomial("0").unwrap().is_zero());
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(
            parse_polynomial("-(x - y)^2").unwrap(),
            p(&[(-1, 2, 0), (2, 1, 1), (-1, 0, 2)])
        );
        assert_eq!(parse_polynomial("-x^2").unwrap(), p(&[(-1, 2, 0)]));
        assert_eq!(parse_polynomial("--x").unwrap(), p(&[(1, 1, 0)]));
    }

    #[test]
    fn rational_literals() {
        let q = parse_polynomial("3/4*x - 6/8").unwrap();
        assert_eq!(q.coeff(&Monomial::X), crate::poly::ratio(3, 4));
        assert_eq!(q.coeff(&Monomial::ONE), crate::poly::ratio(-3, 4));
        assert_eq!(
            parse_polynomial("1/0").unwrap_err().expected,
            vec!["nonzero denominator".to_string()]
        );
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_polynomial("x + * y").unwrap_err();
        assert_eq!(e.position, 4);
        let e = parse_polynomial("xy").unwrap_err();
        assert_eq!(e.position, 1);
        let e = parse_polynomial("(x + y").unwrap_err();
        assert_eq!(e.position, 6);
        let e = parse_polynomial("x^").unwrap_err();
        assert_eq!(e.position, 2);
        let e = parse_polynomial("z").unwrap_err();
        assert_eq!(e.position, 0);
        assert!(parse_polynomial("").is_err());
    }

    #[test]
    fn degree_guard() {
        assert!(parse_polynomial("x^64").is_ok());
        assert!(parse_polynomial("x^65").is_err());
        assert!(parse_polynomial("(x^40)*(y^40)").is_err());
        assert!(parse_polynomial("(x^8)^9").is_err());
        assert!(parse_polynomial("x^99999999999999999999999").is_err());
        assert!(parse_polynomial_with_guard("x^3", 2).is_err());
    }

    #[test]
    fn problem_files() {
        let prob = parse_problem("f1 = x*y^2-x^2+y^2+x-y\nf2 = x-y\nu = 1-x^2-y^2").unwrap();
        assert_eq!(prob.f2, p(&[(1, 1, 0), (-1, 0, 1)]));
        assert_eq!(prob.u, Some(p(&[(1, 0, 0), (-1, 2, 0), (-1, 0, 2)])));

        let prob = parse_problem("# identity\n\nf1 = x   # first\nf2 = y\n").unwrap();
        assert_eq!(prob.f1, Polynomial::x());
        assert!(prob.u.is_none());

        assert_eq!(
            parse_problem("f2 = y").unwrap_err(),
            ProblemError::MissingKey("f1".into())
        );
        assert!(matches!(
            parse_problem("f1 = x\nf1 = y\nf2 = y"),
            Err(ProblemError::DuplicateKey { line: 2, .. })
        ));
        assert!(matches!(
            parse_problem("f1 = x\nf2 = y\nv = x"),
            Err(ProblemError::UnknownKey { line: 3, .. })
        ));
        assert!(matches!(
            parse_problem("f1 x"),
            Err(ProblemError::MalformedLine { line: 1 })
        ));
        match parse_problem("f1 = x\nf2 = y +") {
            Err(ProblemError::Parse { line: 2, source }) => assert_eq!(source.position, 8),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn formats_canonically() {
        let j = p(&[(-2, 1, 1), (-1, 0, 2), (2, 1, 0), (-2, 0, 1)]);
        assert_eq!(format_polynomial(&j), "-2*x*y - y^2 + 2*x - 2*y");
        assert_eq!(format_polynomial(&Polynomial::zero()), "0");
        assert_eq!(format_polynomial(&p(&[(-1, 0, 0)])), "-1");
        let q = parse_polynomial("-3/4*x^2*y + 1/2").unwrap();
        assert_eq!(format_polynomial(&q), "-3/4*x^2*y + 1/2");
    }

    proptest! {
        #![proptest_config(ProptestConfig {
            cases: 1000,
            rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed_0002),
            ..ProptestConfig::default()
        })]

        #[test]
        fn format_round_trips(q in arb_poly(5)) {
            prop_assert_eq!(parse_polynomial(&format_polynomial(&q)).unwrap(), q);
        }

        #[test]
        fn parser_is_total(s in "[xy0-9+*/^() \\-]{0,24}") {
            match parse_polynomial(&s) {
                Ok(_) => {}
                Err(e) => prop_assert!(e.position <= s.len()),
            }
        }

        #[test]
        fn parser_is_total_on_arbitrary_text(s in "\\PC{0,16}") {
            if let Err(e) = parse_polynomial(&s) {
                prop_assert!(e.position <= s.len());
            }
        }
    }
}
