//! Expression language for superfunctions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | 'star') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := number | 'i' | 'pi' | x<k> | xi<k> | 'exp' '(' expr ')' | '(' expr ')'
//! ```
//!
//! Numbers take an optional `i` suffix (`0.5i`). Coordinates are 1-based.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use superstar_core::starprod::DeformationContext;
use superstar_core::superfun::Superfunction;
use superstar_core::ExpPoly;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Number(Complex64),
    Pi,
    Even(usize),
    Odd(usize),
    Exp(Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Star(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown symbol '{name}' at line {line}, column {column}")]
    UnknownSymbol { line: usize, column: usize, name: String },
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("{0} is out of range for this context")]
    OutOfRange(String),
    #[error("exp() needs a polynomial of degree at most 2 in the even coordinates, got {0}")]
    BadExponent(String),
    #[error(transparent)]
    Engine(#[from] superstar_core::Error),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Complex64),
    Ident(String),
    Plus,
    Minus,
    Times,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(z) => write!(f, "number {z}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Times => f.write_str("'*'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn syntax(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line: pos.line, column: pos.column, message: message.into() }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut line_start) = (0, 1, 0);
    while i < chars.len() {
        let pos = Pos { line, column: i - line_start + 1 };
        let ch = chars[i];
        if ch == '\n' {
            line += 1;
            line_start = i + 1;
            i += 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match ch {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Times),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, pos));
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && matches!(chars[i], 'e' | 'E') {
                let mut j = i + 1;
                if j < chars.len() && matches!(chars[j], '+' | '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value: f64 = text.parse().map_err(|_| syntax(pos, format!("malformed number '{text}'")))?;
            let imaginary = i < chars.len() && chars[i] == 'i' && !chars.get(i + 1).is_some_and(|c| c.is_alphanumeric());
            if imaginary {
                i += 1;
            }
            if i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                let column = i - line_start + 1;
                return Err(syntax(Pos { line, column }, "expected an operator after a number"));
            }
            let z = if imaginary { Complex64::new(0.0, value) } else { Complex64::new(value, 0.0) };
            out.push((Tok::Num(z), pos));
        } else if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        } else {
            return Err(syntax(pos, format!("unexpected character '{ch}'")));
        }
    }
    out.push((Tok::End, Pos { line, column: chars.len() - line_start + 1 }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        let (got, pos) = self.bump();
        if got == tok {
            Ok(())
        } else {
            Err(syntax(pos, format!("expected {tok}, found {got}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
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

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Times => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Ident(s) if s == "star" => {
                    self.bump();
                    lhs = Expr::Star(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let (tok, pos) = self.bump();
        match tok {
            Tok::Num(z) if z.im == 0.0 && z.re.fract() == 0.0 && (0.0..=64.0).contains(&z.re) => {
                Ok(Expr::Pow(Box::new(base), z.re as u32))
            }
            other => Err(syntax(pos, format!("expected a small non-negative integer exponent, found {other}"))),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Num(z) => Ok(Expr::Number(z)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "i" => Ok(Expr::Number(Complex64::new(0.0, 1.0))),
                "pi" => Ok(Expr::Pi),
                "exp" => {
                    self.expect(Tok::LParen)?;
                    let inner = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Exp(Box::new(inner)))
                }
                "star" => Err(syntax(pos, "expected an operand before 'star'")),
                _ => coordinate(&name).ok_or(ParseError::UnknownSymbol { line: pos.line, column: pos.column, name }),
            },
            Tok::End => Err(syntax(pos, "unexpected end of input")),
            other => Err(syntax(pos, format!("unexpected {other}"))),
        }
    }
}

fn coordinate(name: &str) -> Option<Expr> {
    let index = |digits: &str| digits.parse::<usize>().ok().filter(|&k| k > 0 && !digits.starts_with('0'));
    if let Some(rest) = name.strip_prefix("xi") {
        index(rest).map(Expr::Odd)
    } else {
        name.strip_prefix('x').and_then(index).map(Expr::Even)
    }
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let e = p.expr()?;
    match p.bump() {
        (Tok::End, _) => Ok(e),
        (tok, pos) => Err(syntax(pos, format!("unexpected {tok}"))),
    }
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Star(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Number(z) if z.re.is_sign_negative() || z.im.is_sign_negative() => 3,
            Expr::Number(z) if z.re != 0.0 && z.im != 0.0 => 1,
            _ => 5,
        }
    }
}

fn wrap(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |f: &mut fmt::Formatter<'_>, l: &Expr, op: &str, r: &Expr, level: u8| {
            wrap(f, l, l.precedence() < level)?;
            write!(f, " {op} ")?;
            wrap(f, r, r.precedence() <= level)
        };
        match self {
            Expr::Number(z) if z.im == 0.0 => write!(f, "{}", z.re),
            Expr::Number(z) if z.re == 0.0 => write!(f, "{}i", z.im),
            Expr::Number(z) => write!(f, "{} + {}i", z.re, z.im),
            Expr::Pi => f.write_str("pi"),
            Expr::Even(k) => write!(f, "x{k}"),
            Expr::Odd(k) => write!(f, "xi{k}"),
            Expr::Exp(inner) => write!(f, "exp({inner})"),
            Expr::Neg(inner) => {
                f.write_str("-")?;
                wrap(f, inner, inner.precedence() < 3)
            }
            Expr::Pow(base, k) => {
                wrap(f, base, base.precedence() < 5)?;
                write!(f, "^{k}")
            }
            Expr::Add(l, r) => binary(f, l, "+", r, 1),
            Expr::Sub(l, r) => binary(f, l, "-", r, 1),
            Expr::Mul(l, r) => binary(f, l, "*", r, 2),
            Expr::Star(l, r) => binary(f, l, "star", r, 2),
        }
    }
}

/// Evaluates in the superfunction algebra of `ctx`; `star` uses the deformed product.
pub fn evaluate(e: &Expr, ctx: &DeformationContext) -> Result<Superfunction, EvalError> {
    let (d, n) = (2 * ctx.m(), ctx.n());
    Ok(match e {
        Expr::Number(z) => Superfunction::constant(d, n, *z),
        Expr::Pi => Superfunction::constant(d, n, Complex64::new(std::f64::consts::PI, 0.0)),
        Expr::Even(k) if *k <= d => Superfunction::even_coordinate(d, n, k - 1),
        Expr::Odd(k) if *k <= n => Superfunction::odd_coordinate(d, n, *k)?,
        Expr::Even(_) | Expr::Odd(_) => return Err(EvalError::OutOfRange(e.to_string())),
        Expr::Exp(inner) => {
            let f = evaluate(inner, ctx)?;
            let body = exp_of_quadratic(&f).ok_or_else(|| EvalError::BadExponent(inner.to_string()))?;
            Superfunction::even(n, body)
        }
        Expr::Neg(inner) => evaluate(inner, ctx)?.neg(),
        Expr::Pow(base, k) => {
            let b = evaluate(base, ctx)?;
            let mut out = Superfunction::one(d, n);
            for _ in 0..*k {
                out = out.smul(&b)?;
            }
            out
        }
        Expr::Add(l, r) => evaluate(l, ctx)?.add(&evaluate(r, ctx)?)?,
        Expr::Sub(l, r) => evaluate(l, ctx)?.sub(&evaluate(r, ctx)?)?,
        Expr::Mul(l, r) => evaluate(l, ctx)?.smul(&evaluate(r, ctx)?)?,
        Expr::Star(l, r) => ctx.star(&evaluate(l, ctx)?, &evaluate(r, ctx)?)?,
    })
}

/// `exp(p)` for an even polynomial `p` of degree at most 2.
fn exp_of_quadratic(f: &Superfunction) -> Option<ExpPoly> {
    let d = f.m();
    let mut body = f.body().terms();
    let p = match (body.next(), body.next()) {
        (None, _) => return Some(ExpPoly::constant(d, Complex64::new(1.0, 0.0))),
        (Some((0, p)), None) => p,
        _ => return None,
    };
    let mut a = DMatrix::zeros(d, d);
    let mut b = vec![Complex64::new(0.0, 0.0); d];
    let mut c0 = Complex64::new(0.0, 0.0);
    for (c, alpha, big_a, lin) in p.term_list() {
        if big_a.iter().chain(&lin).any(|z| z.norm() != 0.0) {
            return None;
        }
        let nonzero: Vec<(usize, u16)> = alpha.iter().copied().enumerate().filter(|&(_, e)| e > 0).collect();
        match nonzero.as_slice() {
            [] => c0 += c,
            [(i, 1)] => b[*i] += c,
            [(i, 2)] => a[(*i, *i)] += c,
            [(i, 1), (j, 1)] => {
                a[(*i, *j)] += c * 0.5;
                a[(*j, *i)] += c * 0.5;
            }
            _ => return None,
        }
    }
    ExpPoly::exponential(c0.exp(), &a, &b).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(x: f64) -> Box<Expr> {
        Box::new(Expr::Number(Complex64::new(x, 0.0)))
    }

    #[test]
    fn star_of_coordinates() {
        assert_eq!(parse("x1 star x2").unwrap(), Expr::Star(Box::new(Expr::Even(1)), Box::new(Expr::Even(2))));
    }

    #[test]
    fn exp_times_odd() {
        let e = parse("exp(-x1^2) * xi1").unwrap();
        let expected = Expr::Mul(
            Box::new(Expr::Exp(Box::new(Expr::Neg(Box::new(Expr::Pow(Box::new(Expr::Even(1)), 2)))))),
            Box::new(Expr::Odd(1)),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn dangling_star_is_end_of_input() {
        let err = parse("x1 star").unwrap_err();
        assert_eq!(err, ParseError::Syntax { line: 1, column: 8, message: "unexpected end of input".into() });
    }

    #[test]
    fn errors_carry_line_and_column() {
        match parse("x1 +\n  foo").unwrap_err() {
            ParseError::UnknownSymbol { line, column, name } => assert_eq!((line, column, name.as_str()), (2, 3, "foo")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("(x1"), Err(ParseError::Syntax { column: 4, .. })));
        assert!(matches!(parse("2x1"), Err(ParseError::Syntax { column: 2, .. })));
        assert!(matches!(parse("x0"), Err(ParseError::UnknownSymbol { .. })));
        assert!(matches!(parse("x1 ^ 2.5"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn whitespace_insensitive_and_left_associative() {
        assert_eq!(parse("1-2-3").unwrap(), parse(" 1 -  2\t- 3 ").unwrap());
        assert_eq!(parse("1-2-3").unwrap(), Expr::Sub(Box::new(Expr::Sub(num(1.0), num(2.0))), num(3.0)));
    }

    #[test]
    fn numbers_and_constants() {
        assert_eq!(parse("0.5i").unwrap(), Expr::Number(Complex64::new(0.0, 0.5)));
        assert_eq!(parse("i").unwrap(), Expr::Number(Complex64::new(0.0, 1.0)));
        assert_eq!(parse("1e-3").unwrap(), Expr::Number(Complex64::new(1e-3, 0.0)));
        assert_eq!(parse("pi").unwrap(), Expr::Pi);
        assert_eq!(parse("xi12").unwrap(), Expr::Odd(12));
    }

    #[test]
    fn print_round_trip() {
        for src in [
            "x1 star x2",
            "exp(-x1^2) * xi1",
            "1 - (2 - 3)",
            "-(x1 + x2) star (xi1 * xi2)",
            "(x1 star x2) star x1 - x1 star (x2 star x1)",
            "--x1^3 + 0.25i * exp(0.5 * x1 * x2 - x2^2 + i * x1)",
            "(x1 + 1)^2 * pi",
            "1e-30 + 123456789.5",
        ] {
            let e = parse(src).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{src} printed as {e}");
        }
    }

    #[test]
    fn coordinate_commutator_from_expressions() {
        let ctx = DeformationContext::new(1.0, 1, 0, (0, 0)).unwrap();
        let comm = evaluate(&parse("x1 star x2 - x2 star x1").unwrap(), &ctx).unwrap();
        let expected = Superfunction::constant(2, 0, Complex64::new(0.0, ctx.sigma()));
        assert!(comm.approx_eq(&expected, 1e-12));
    }

    #[test]
    fn exp_of_quadratic_matches_gaussian() {
        let ctx = DeformationContext::new(1.0, 1, 1, (1, 0)).unwrap();
        let f = evaluate(&parse("exp(-x1^2 - 2*x2^2)").unwrap(), &ctx).unwrap();
        let g = Superfunction::even(1, ExpPoly::gaussian(Complex64::new(1.0, 0.0), &[1.0, 2.0]));
        assert!(f.approx_eq(&g, 1e-14));
        assert!(matches!(
            evaluate(&parse("exp(x1^3)").unwrap(), &ctx),
            Err(EvalError::BadExponent(_))
        ));
        assert!(matches!(evaluate(&parse("exp(xi1)").unwrap(), &ctx), Err(EvalError::BadExponent(_))));
        assert!(matches!(evaluate(&parse("x3").unwrap(), &ctx), Err(EvalError::OutOfRange(_))));
    }

    #[test]
    fn odd_generators_square_to_zero_classically() {
        let ctx = DeformationContext::new(1.0, 1, 2, (1, 1)).unwrap();
        assert!(evaluate(&parse("xi1 * xi1").unwrap(), &ctx).unwrap().is_zero());
    }
}
