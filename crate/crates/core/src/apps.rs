//! Square root by Heron iteration, multiplication by limits, and `poslog`.

use std::sync::{Arc, Mutex};

use num_bigint::BigInt;

use crate::cauchy::{mul_c, Modulus};
use crate::convert::{cauchy_to_stream, stream_to_cauchy};
use crate::digit::SignedDigit::{self, Minus, Plus, Zero};
use crate::error::{Error, Result};
use crate::limit::{direct_limit, LimitKind};
use crate::ops::{average, divide};
use crate::stream::{ones, sd_times, zeros, DigitStream};
use crate::Rational;

/// Least `n` with `p <= 2^n`.
pub fn poslog(p: u64) -> Result<u32> {
    if p == 0 {
        return Err(Error::NotPositive(p));
    }
    Ok(u64::BITS - (p - 1).leading_zeros())
}

/// Heron iterates `H(x, 0) = 1`, `H(x, n+1) = (H(x, n) + x / H(x, n)) / 2`,
/// computed once each.
#[derive(Clone)]
pub struct Heron {
    x: DigitStream,
    iterates: Arc<Mutex<Vec<DigitStream>>>,
}

impl Heron {
    /// Requires `1/16 <= x <= 1`.
    pub fn new(x: &DigitStream) -> Self {
        Heron {
            // Exact tags would make every iterate carry a rational whose size
            // doubles per step.
            x: x.untagged(),
            iterates: Arc::new(Mutex::new(vec![ones()])),
        }
    }

    pub fn get(&self, n: u64) -> DigitStream {
        let mut hs = self.iterates.lock().unwrap_or_else(|e| e.into_inner());
        while hs.len() as u64 <= n {
            let h = hs.last().expect("iterates start with H(x, 0)").clone();
            hs.push(average(&h, &divide(&self.x, &h)));
        }
        hs[n as usize].clone()
    }
}

/// `H(x, n)` as a stream.
pub fn heron(x: &DigitStream, n: u64) -> DigitStream {
    Heron::new(x).get(n)
}

/// `sqrt(x)` for `x >= 0`.
///
/// Rules on the leading digits, first match wins:
/// `1̄u -> 0`, `01̄u -> 0`, `00u -> 0 sqrt(u)`, `011̄u -> 0 sqrt(1u)`,
/// `11̄1̄u -> 0 sqrt(1u)`; otherwise the direct limit of the Heron iterates
/// with the identity modulus.
pub fn sqrt_stream(u: &DigitStream) -> DigitStream {
    let w = u.clone();
    DigitStream::defer(move || sqrt_step(&w))
}

fn sqrt_step(u: &DigitStream) -> DigitStream {
    let (d1, t1) = u.destruct();
    if d1 == Minus {
        return zeros();
    }
    let (d2, t2) = t1.destruct();
    match (d1, d2) {
        (Zero, Minus) => return zeros(),
        (Zero, Zero) => return DigitStream::cons(Zero, sqrt_stream(&t2)),
        _ => {}
    }
    let (d3, t3) = t2.destruct();
    match (d1, d2, d3) {
        (Zero, Plus, Minus) | (Plus, Minus, Minus) => {
            DigitStream::cons(Zero, sqrt_stream(&DigitStream::cons(Plus, t3)))
        }
        _ => {
            if let Some(q) = u.exact_value() {
                debug_assert!(
                    *q >= Rational::new(1.into(), 8.into()),
                    "Heron branch reached with value {q} below 1/8"
                );
            }
            let heron = Heron::new(u);
            direct_limit(&Modulus::identity(), move |n| heron.get(n))
        }
    }
}

/// `x * Sum(l)`: `multSum(u, []) = 0`, `multSum(u, d :: l) =
/// average(d u, multSum(u, l))`.
pub fn mult_sum(u: &DigitStream, l: &[SignedDigit]) -> DigitStream {
    let u = u.untagged();
    l.iter()
        .rev()
        .fold(zeros(), |acc, &d| average(&sd_times(d, &u), &acc))
}

fn tag_product(out: DigitStream, u: &DigitStream, v: &DigitStream) -> DigitStream {
    match (u.exact_value(), v.exact_value()) {
        (Some(a), Some(b)) => out.with_exact(a * b),
        _ => out,
    }
}

/// `x * y` as the limit of `n -> multSum(u, prefix(v, n))` with the identity
/// modulus.
pub fn mult_via_limit(u: &DigitStream, v: &DigitStream, kind: LimitKind) -> DigitStream {
    let (a, b) = (u.untagged(), v.untagged());
    let out = kind.limit(&Modulus::identity(), move |n| {
        mult_sum(&a, &b.prefix(n as usize))
    });
    tag_product(out, u, v)
}

/// `x * y` from the product of the two Cauchy sequences.
pub fn mult_via_cauchy(u: &DigitStream, v: &DigitStream) -> DigitStream {
    let out = cauchy_to_stream(&mul_c(&stream_to_cauchy(u), &stream_to_cauchy(v)));
    tag_product(out, u, v)
}

/// Exact Heron iterate `H(x, n)` over the rationals.
pub fn heron_rational(x: &Rational, n: u32) -> Rational {
    let mut h = Rational::from_integer(1.into());
    for _ in 0..n {
        h = (&h + x / &h) / BigInt::from(2);
    }
    h
}
