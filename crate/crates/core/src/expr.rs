//! A small expression language over `[-1, 1]`.
//!
//! ```text
//! expr := rat
//!       | "sqrt(" expr ")"
//!       | "avg(" expr "," expr ")"
//!       | ("mul" | "mul_direct" | "mul_indirect" | "mul_cauchy") "(" expr "," expr ")"
//!       | "div(" expr "," expr ")"
//!       | ("lim_direct" | "lim_indirect") "(" seq "," modulus ")"
//! rat  := ["-"] int ["/" int]
//! seq  := "zero" | "third"
//! modulus := "id" | "square" | "cube"
//! ```
//!
//! Plain `mul` uses the direct limit. Whitespace is insignificant.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::apps::{mult_via_cauchy, mult_via_limit, sqrt_stream};
use crate::cauchy::{check_unit, inv_pow2, Modulus};
use crate::convert::stream_of_rational;
use crate::error::{Error, Result};
use crate::limit::LimitKind;
use crate::ops::{average, divide};
use crate::stream::{zeros, DigitStream};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MulVariant {
    Direct,
    Indirect,
    Cauchy,
}

/// Built-in convergent sequences for `lim_*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeqName {
    /// `n -> 0`.
    Zero,
    /// `n -> 1/3 - 2^-(n+2)`.
    Third,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModName {
    Id,
    Square,
    Cube,
}

impl SeqName {
    fn limit(self) -> Rational {
        match self {
            SeqName::Zero => Rational::zero(),
            SeqName::Third => Rational::new(1.into(), 3.into()),
        }
    }

    /// Stream function for this sequence.
    pub fn stream_fn(self) -> impl Fn(u64) -> DigitStream + Send + Sync + 'static {
        let zero = zeros();
        move |n| match self {
            SeqName::Zero => zero.clone(),
            SeqName::Third => {
                stream_of_rational(self.limit() - inv_pow2(n + 2)).expect("term lies in [-1, 1]")
            }
        }
    }
}

impl ModName {
    pub fn modulus(self) -> Modulus {
        match self {
            ModName::Id => Modulus::identity(),
            ModName::Square => Modulus::power(2),
            ModName::Cube => Modulus::power(3),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Lit(Rational),
    Sqrt(Box<Expr>),
    Avg(Box<Expr>, Box<Expr>),
    Mul(MulVariant, Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Limit(LimitKind, SeqName, ModName),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(q) => write!(f, "{q}"),
            Expr::Sqrt(e) => write!(f, "sqrt({e})"),
            Expr::Avg(a, b) => write!(f, "avg({a}, {b})"),
            Expr::Mul(v, a, b) => {
                let name = match v {
                    MulVariant::Direct => "mul_direct",
                    MulVariant::Indirect => "mul_indirect",
                    MulVariant::Cauchy => "mul_cauchy",
                };
                write!(f, "{name}({a}, {b})")
            }
            Expr::Div(a, b) => write!(f, "div({a}, {b})"),
            Expr::Limit(k, s, m) => {
                let s = match s {
                    SeqName::Zero => "zero",
                    SeqName::Third => "third",
                };
                let m = match m {
                    ModName::Id => "id",
                    ModName::Square => "square",
                    ModName::Cube => "cube",
                };
                write!(f, "lim_{}({s}, {m})", k.name())
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("ascii digits parse"))
    }

    fn rational(&mut self) -> Result<Rational> {
        let negative = self.peek() == Some(b'-');
        if negative {
            self.pos += 1;
        }
        let num = self.integer()?;
        let den = if self.peek() == Some(b'/') {
            self.pos += 1;
            let d = self.integer()?;
            if d.is_zero() {
                return self.err("zero denominator");
            }
            d
        } else {
            BigInt::from(1)
        };
        let q = Rational::new(if negative { -num } else { num }, den);
        check_unit(&q)?;
        Ok(q)
    }

    fn args2(&mut self) -> Result<(Box<Expr>, Box<Expr>)> {
        self.expect(b'(')?;
        let a = self.expr()?;
        self.expect(b',')?;
        let b = self.expr()?;
        self.expect(b')')?;
        Ok((Box::new(a), Box::new(b)))
    }

    fn expr(&mut self) -> Result<Expr> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(c) if c == b'-' || c.is_ascii_digit() => Ok(Expr::Lit(self.rational()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let at = self.pos;
                let name = self.ident();
                match name.as_str() {
                    "sqrt" => {
                        self.expect(b'(')?;
                        let e = self.expr()?;
                        self.expect(b')')?;
                        Ok(Expr::Sqrt(Box::new(e)))
                    }
                    "avg" => {
                        let (a, b) = self.args2()?;
                        Ok(Expr::Avg(a, b))
                    }
                    "div" => {
                        let (a, b) = self.args2()?;
                        Ok(Expr::Div(a, b))
                    }
                    "mul" | "mul_direct" | "mul_indirect" | "mul_cauchy" => {
                        let v = match name.as_str() {
                            "mul_indirect" => MulVariant::Indirect,
                            "mul_cauchy" => MulVariant::Cauchy,
                            _ => MulVariant::Direct,
                        };
                        let (a, b) = self.args2()?;
                        Ok(Expr::Mul(v, a, b))
                    }
                    "lim_direct" | "lim_indirect" => {
                        let kind = if name == "lim_direct" {
                            LimitKind::Direct
                        } else {
                            LimitKind::Indirect
                        };
                        self.expect(b'(')?;
                        let s = match self.ident().as_str() {
                            "zero" => SeqName::Zero,
                            "third" => SeqName::Third,
                            other => return self.err(format!("unknown sequence `{other}`")),
                        };
                        self.expect(b',')?;
                        let m = match self.ident().as_str() {
                            "id" => ModName::Id,
                            "square" => ModName::Square,
                            "cube" => ModName::Cube,
                            other => return self.err(format!("unknown modulus `{other}`")),
                        };
                        self.expect(b')')?;
                        Ok(Expr::Limit(kind, s, m))
                    }
                    _ => {
                        self.pos = at;
                        self.err(format!("unknown function `{name}`"))
                    }
                }
            }
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Bits kept by the rational square-root enclosures.
const SQRT_BITS: u64 = 40;

fn sqrt_floor(q: &Rational) -> Rational {
    let scaled = (q * Rational::from_integer(BigInt::from(1) << (2 * SQRT_BITS))).floor();
    Rational::new(scaled.to_integer().sqrt(), BigInt::from(1) << SQRT_BITS)
}

fn sqrt_ceil(q: &Rational) -> Rational {
    let scaled = (q * Rational::from_integer(BigInt::from(1) << (2 * SQRT_BITS))).ceil();
    let r = scaled.to_integer().sqrt();
    let r = if &r * &r == scaled.to_integer() {
        r
    } else {
        r + 1
    };
    Rational::new(r, BigInt::from(1) << SQRT_BITS)
}

fn min_max(vals: [Rational; 4]) -> (Rational, Rational) {
    let lo = vals.iter().min().expect("four values").clone();
    let hi = vals.iter().max().expect("four values").clone();
    (lo, hi)
}

/// A rational interval containing the value of `e`, checking the
/// preconditions of `div` and `sqrt` along the way.
pub fn enclosure(e: &Expr) -> Result<(Rational, Rational)> {
    let violated = |msg: &str| Error::Precondition {
        expr: e.to_string(),
        msg: msg.to_string(),
    };
    match e {
        Expr::Lit(q) => Ok((q.clone(), q.clone())),
        Expr::Sqrt(a) => {
            let (lo, hi) = enclosure(a)?;
            if lo.is_negative() {
                return Err(violated("argument may be negative"));
            }
            Ok((sqrt_floor(&lo), sqrt_ceil(&hi)))
        }
        Expr::Avg(a, b) => {
            let (al, ah) = enclosure(a)?;
            let (bl, bh) = enclosure(b)?;
            let two = BigInt::from(2);
            Ok(((al + bl) / &two, (ah + bh) / &two))
        }
        Expr::Mul(_, a, b) => {
            let (al, ah) = enclosure(a)?;
            let (bl, bh) = enclosure(b)?;
            Ok(min_max([&al * &bl, &al * &bh, &ah * &bl, &ah * &bh]))
        }
        Expr::Div(a, b) => {
            let (al, ah) = enclosure(a)?;
            let (bl, bh) = enclosure(b)?;
            if bl < Rational::new(1.into(), 4.into()) {
                return Err(violated("divisor may be below 1/4"));
            }
            if al.abs().max(ah.abs()) > bl {
                return Err(violated("|numerator| may exceed the divisor"));
            }
            Ok(min_max([&al / &bl, &al / &bh, &ah / &bl, &ah / &bh]))
        }
        Expr::Limit(_, s, _) => Ok((s.limit(), s.limit())),
    }
}

/// The stream denoted by `e`. Preconditions are not checked here.
pub fn build(e: &Expr) -> Result<DigitStream> {
    Ok(match e {
        Expr::Lit(q) => stream_of_rational(q.clone())?,
        Expr::Sqrt(a) => sqrt_stream(&build(a)?),
        Expr::Avg(a, b) => average(&build(a)?, &build(b)?),
        Expr::Mul(v, a, b) => {
            let (u, w) = (build(a)?, build(b)?);
            match v {
                MulVariant::Direct => mult_via_limit(&u, &w, LimitKind::Direct),
                MulVariant::Indirect => mult_via_limit(&u, &w, LimitKind::Indirect),
                MulVariant::Cauchy => mult_via_cauchy(&u, &w),
            }
        }
        Expr::Div(a, b) => divide(&build(a)?, &build(b)?),
        Expr::Limit(k, s, m) => k.limit(&m.modulus(), s.stream_fn()),
    })
}

/// `n` digits of an expression and their exact value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub digits: String,
    pub approx: Rational,
    /// Enclosure of the exact value, from the precondition check.
    pub enclosure: (Rational, Rational),
}

/// Checks preconditions, then computes `n` digits of `e`.
pub fn eval_digits(e: &Expr, n: usize) -> Result<Evaluation> {
    let enclosure = enclosure(e)?;
    let u = build(e)?;
    let digits = u.prefix(n);
    Ok(Evaluation {
        digits: crate::digit::render(&digits),
        approx: crate::digit::sum_digits(&digits),
        enclosure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse_expr("sqrt(1/4)").unwrap(),
            Expr::Sqrt(Box::new(Expr::Lit(q(1, 4))))
        );
        assert_eq!(
            parse_expr(" avg( 1/2 , -1/2 ) ").unwrap(),
            Expr::Avg(Box::new(Expr::Lit(q(1, 2))), Box::new(Expr::Lit(q(-1, 2))))
        );
        assert_eq!(
            parse_expr("sqrt(3/2)").unwrap_err(),
            Error::OutOfRange(Box::new(q(3, 2)))
        );
        assert_eq!(parse_expr("-1").unwrap(), Expr::Lit(q(-1, 1)));
        assert!(matches!(
            parse_expr("mul_cauchy(1/2, 1/3)").unwrap(),
            Expr::Mul(MulVariant::Cauchy, _, _)
        ));
        assert!(matches!(
            parse_expr("mul(1/2, 1/3)").unwrap(),
            Expr::Mul(MulVariant::Direct, _, _)
        ));
        assert_eq!(
            parse_expr("lim_indirect(third, cube)").unwrap(),
            Expr::Limit(LimitKind::Indirect, SeqName::Third, ModName::Cube)
        );
    }

    #[test]
    fn syntax_errors_carry_positions() {
        for (text, pos) in [
            ("avg(1/2 1/2)", 8),
            ("foo(1)", 0),
            ("1/0", 3),
            ("1/2)", 3),
            ("", 0),
        ] {
            match parse_expr(text) {
                Err(Error::Syntax { pos: p, .. }) => assert_eq!(p, pos, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn display_round_trips() {
        let text = "div(mul_indirect(1/2, -1/3), avg(sqrt(1/4), lim_direct(zero, id)))";
        let e = parse_expr(text).unwrap();
        assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn eval_examples() {
        let r = eval_digits(&parse_expr("0").unwrap(), 4).unwrap();
        assert_eq!(r.digits, "0000");
        assert_eq!(r.approx, q(0, 1));
        let r = eval_digits(&parse_expr("sqrt(1/4)").unwrap(), 20).unwrap();
        assert!((r.approx - q(1, 2)).abs() <= inv_pow2(20));
        let err = eval_digits(&parse_expr("div(1/4, 1/8)").unwrap(), 4).unwrap_err();
        assert!(matches!(err, Error::Precondition { ref expr, .. } if expr == "div(1/4, 1/8)"));
        assert!(eval_digits(&parse_expr("sqrt(avg(-1/2, 0))").unwrap(), 4).is_err());
    }

    #[test]
    fn eval_limits() {
        for text in ["lim_direct(third, id)", "lim_indirect(third, square)"] {
            let r = eval_digits(&parse_expr(text).unwrap(), 20).unwrap();
            assert!((r.approx - q(1, 3)).abs() <= inv_pow2(20), "{text}");
        }
    }

    #[test]
    fn sqrt_enclosure_brackets() {
        let (lo, hi) = enclosure(&parse_expr("sqrt(1/3)").unwrap()).unwrap();
        assert!(&lo * &lo <= q(1, 3) && &hi * &hi >= q(1, 3));
        assert!(hi - lo <= inv_pow2(SQRT_BITS - 1));
    }
}
