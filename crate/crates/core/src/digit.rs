//! Signed binary digits and finite digit lists.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::Rational;

/// A binary signed digit, one of `-1`, `0`, `+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(i8)]
pub enum SignedDigit {
    Minus = -1,
    Zero = 0,
    Plus = 1,
}

impl SignedDigit {
    pub const ALL: [SignedDigit; 3] = [SignedDigit::Minus, SignedDigit::Zero, SignedDigit::Plus];

    #[inline]
    pub fn to_i8(self) -> i8 {
        self as i8
    }

    /// Returns `None` unless `v` is in `{-1, 0, 1}`.
    pub fn from_int(v: i64) -> Option<Self> {
        match v {
            -1 => Some(SignedDigit::Minus),
            0 => Some(SignedDigit::Zero),
            1 => Some(SignedDigit::Plus),
            _ => None,
        }
    }

    #[inline]
    pub fn negate(self) -> Self {
        match self {
            SignedDigit::Minus => SignedDigit::Plus,
            SignedDigit::Zero => SignedDigit::Zero,
            SignedDigit::Plus => SignedDigit::Minus,
        }
    }

    #[inline]
    pub fn times(self, other: SignedDigit) -> Self {
        match (self, other) {
            (SignedDigit::Zero, _) | (_, SignedDigit::Zero) => SignedDigit::Zero,
            (a, b) if a == b => SignedDigit::Plus,
            _ => SignedDigit::Minus,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            SignedDigit::Minus => '-',
            SignedDigit::Zero => '0',
            SignedDigit::Plus => '+',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '-' => Some(SignedDigit::Minus),
            '0' => Some(SignedDigit::Zero),
            '+' => Some(SignedDigit::Plus),
            _ => None,
        }
    }
}

impl From<SignedDigit> for i64 {
    fn from(d: SignedDigit) -> i64 {
        d.to_i8() as i64
    }
}

impl fmt::Display for SignedDigit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A finite list of signed digits `d1 d2 ... dn`, denoting `sum di 2^-i`.
pub type DigitList = Vec<SignedDigit>;

/// Exact value `sum_{i=1}^{len} l_i 2^-i` of a digit list.
pub fn sum_digits(digits: &[SignedDigit]) -> Rational {
    Rational::new(dyadic_numerator(digits), BigInt::one() << digits.len())
}

/// Numerator `N` with `sum_digits(l) = N / 2^len`.
pub(crate) fn dyadic_numerator(digits: &[SignedDigit]) -> BigInt {
    let mut acc = BigInt::zero();
    for d in digits {
        acc <<= 1;
        acc += d.to_i8();
    }
    acc
}

/// Renders digits over the alphabet `{+, 0, -}`.
pub fn render(digits: &[SignedDigit]) -> String {
    digits.iter().map(|d| d.to_char()).collect()
}

/// Parses a string over `{+, 0, -}`; `None` on any other character.
pub fn parse_digits(s: &str) -> Option<DigitList> {
    s.chars().map(SignedDigit::from_char).collect()
}

/// Shorthand for digit tables in tests: `digits(&[1, 0, -1])`.
pub fn digits(values: &[i8]) -> DigitList {
    values
        .iter()
        .map(|&v| SignedDigit::from_int(v as i64).expect("digit out of range"))
        .collect()
}
