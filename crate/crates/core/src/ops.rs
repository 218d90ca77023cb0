//! Stream transformers: `x ± 1`, doubling, `x/2 ± 1/4`, average, division
//! and the three-digit classifier.
//!
//! When an input carries its exact rational value, the value of the output
//! is tracked as well and semantic preconditions are checked against it.
//! Violations are logged and counted; the output is still a well-formed
//! stream, just without a value guarantee.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::cauchy::div_c;
use crate::convert::{cauchy_to_stream, stream_to_cauchy};
use crate::digit::SignedDigit::{self, Minus, Plus, Zero};
use crate::stream::{minus_ones, ones, DigitStream, Next};
use crate::Rational;

static VIOLATIONS: AtomicUsize = AtomicUsize::new(0);

/// Precondition violations detected on exactly-known inputs so far.
pub fn precondition_violations() -> usize {
    VIOLATIONS.load(Ordering::Relaxed)
}

fn report(op: &str, msg: String) {
    VIOLATIONS.fetch_add(1, Ordering::Relaxed);
    log::warn!("{op}: precondition violated: {msg}");
}

fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Direction of a unit shift or quarter shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn unit(self) -> Rational {
        match self {
            Sign::Plus => Rational::one(),
            Sign::Minus => -Rational::one(),
        }
    }
}

/// `x + 1` for `x <= 0` (`Sign::Plus`) or `x - 1` for `x >= 0`
/// (`Sign::Minus`).
///
/// `f(1̄v) = 1v`, `f(0v) = 1 f(v)`, `f(1v) = 111...`; the minus case is the
/// digit-mirrored dual.
pub fn shift_one(u: &DigitStream, dir: Sign) -> DigitStream {
    let exact = u.exact_value().cloned().map(|q| {
        let bad = match dir {
            Sign::Plus => q > Rational::from_integer(0.into()),
            Sign::Minus => q < Rational::from_integer(0.into()),
        };
        if bad {
            report(
                "shift_one",
                format!("value {q} has the wrong sign for {dir:?}"),
            );
        }
        q + dir.unit()
    });
    let (lead, back) = match dir {
        Sign::Plus => (Plus, Minus),
        Sign::Minus => (Minus, Plus),
    };
    let out = DigitStream::corec(u.clone(), move |w: DigitStream| {
        let (d, v) = w.destruct();
        let next = if d == back {
            Next::Splice(v)
        } else if d == Zero {
            Next::Continue(v)
        } else if lead == Plus {
            Next::Splice(ones())
        } else {
            Next::Splice(minus_ones())
        };
        (lead, next)
    });
    tagged(out, exact)
}

/// `2x` for `|x| <= 1/2`: `D(1̄u) = g(u)`, `D(0u) = u`, `D(1u) = f(u)`.
pub fn double(u: &DigitStream) -> DigitStream {
    let exact = u.exact_value().cloned().map(|q| {
        if q.abs() > ratio(1, 2) {
            report("double", format!("|{q}| exceeds 1/2"));
        }
        q * BigInt::from(2)
    });
    let w = u.clone();
    let out = DigitStream::defer(move || {
        let (d, t) = w.destruct();
        match d {
            Minus => shift_one(&t, Sign::Minus),
            Zero => t,
            Plus => shift_one(&t, Sign::Plus),
        }
    });
    tagged(out, exact)
}

/// `x/2 + 1/4` (`Sign::Plus`) or `x/2 - 1/4` (`Sign::Minus`).
///
/// `q⁺`: `1̄u -> 00u`, `0u -> 01u`, `1u -> 10u`.
/// `q⁻`: `1̄u -> 1̄0u`, `0u -> 01̄u`, `1u -> 00u`.
pub fn quarter_shift(u: &DigitStream, dir: Sign) -> DigitStream {
    let exact = u
        .exact_value()
        .map(|q| q / BigInt::from(2) + dir.unit() * ratio(1, 4));
    let w = u.clone();
    let out = DigitStream::defer(move || {
        let (d, t) = w.destruct();
        let lead = match (dir, d) {
            (Sign::Plus, Minus) => [Zero, Zero],
            (Sign::Plus, Zero) => [Zero, Plus],
            (Sign::Plus, Plus) => [Plus, Zero],
            (Sign::Minus, Minus) => [Minus, Zero],
            (Sign::Minus, Zero) => [Zero, Minus],
            (Sign::Minus, Plus) => [Zero, Zero],
        };
        DigitStream::prepend(&lead, t)
    });
    tagged(out, exact)
}

enum AvgState {
    Start(DigitStream, DigitStream),
    // (i, u, v) denotes (i + u + v) / 4
    Run(i8, DigitStream, DigitStream),
}

/// `(x + y) / 2` by carry propagation; `n` output digits read `n + 1`
/// digits of each input.
pub fn average(u: &DigitStream, v: &DigitStream) -> DigitStream {
    let exact = match (u.exact_value(), v.exact_value()) {
        (Some(a), Some(b)) => Some((a + b) / BigInt::from(2)),
        _ => None,
    };
    let out = DigitStream::corec(AvgState::Start(u.clone(), v.clone()), |state| {
        let (carry, u, v) = match state {
            AvgState::Start(u, v) => {
                let (d, u) = u.destruct();
                let (e, v) = v.destruct();
                (d.to_i8() + e.to_i8(), u, v)
            }
            AvgState::Run(i, u, v) => (i, u, v),
        };
        let (d, u) = u.destruct();
        let (e, v) = v.destruct();
        let k = 2 * carry + d.to_i8() + e.to_i8();
        let out = if k >= 2 {
            Plus
        } else if k <= -2 {
            Minus
        } else {
            Zero
        };
        let carry = k - 4 * out.to_i8();
        debug_assert!(
            (-2..=2).contains(&carry),
            "average carry {carry} out of range"
        );
        (out, Next::Continue(AvgState::Run(carry, u, v)))
    });
    tagged(out, exact)
}

/// `x / y` for `|x| <= y` and `y >= 1/4`, through the Cauchy representation.
pub fn divide(u: &DigitStream, v: &DigitStream) -> DigitStream {
    let exact = match (u.exact_value(), v.exact_value()) {
        (Some(a), Some(b)) => {
            if *b < ratio(1, 4) || a.abs() > *b {
                report("divide", format!("{a} / {b} needs |x| <= y and y >= 1/4"));
            }
            if b.is_positive() {
                Some(a / b)
            } else {
                None
            }
        }
        _ => None,
    };
    let out = cauchy_to_stream(&div_c(&stream_to_cauchy(u), &stream_to_cauchy(v)));
    tagged(out, exact)
}

fn tagged(u: DigitStream, exact: Option<Rational>) -> DigitStream {
    match exact {
        Some(q) => u.with_exact(q),
        None => u,
    }
}

/// Coarse position of a stream's value read off its first three digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Triple {
    /// In `[1/8, 1]`.
    R,
    /// In `[-1/4, 1/4]`.
    M,
    /// In `[-1, -1/8]`.
    L,
}

impl Triple {
    pub fn digit(self) -> SignedDigit {
        match self {
            Triple::R => Plus,
            Triple::M => Zero,
            Triple::L => Minus,
        }
    }
}

/// Classifies a three-digit prefix.
pub fn classify_prefix(d1: SignedDigit, d2: SignedDigit, d3: SignedDigit) -> Triple {
    match (d1, d2, d3) {
        (Plus, Plus | Zero, _) => Triple::R,
        (Plus, Minus, Plus | Zero) => Triple::R,
        (Zero, Plus, Plus | Zero) => Triple::R,
        (Minus, Minus | Zero, _) => Triple::L,
        (Minus, Plus, Minus | Zero) => Triple::L,
        (Zero, Minus, Minus | Zero) => Triple::L,
        (Zero, Zero, _) => Triple::M,
        (Minus, Plus, Plus) | (Plus, Minus, Minus) => Triple::M,
        (Zero, Plus, Minus) | (Zero, Minus, Plus) => Triple::M,
    }
}

/// Reads exactly three digits of `u` and classifies its value.
pub fn triple_cases(u: &DigitStream) -> Triple {
    let (d1, t) = u.destruct();
    let (d2, t) = t.destruct();
    let (d3, _) = t.destruct();
    classify_prefix(d1, d2, d3)
}
