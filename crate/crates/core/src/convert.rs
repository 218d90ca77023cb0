//! Translations between digit streams and Cauchy reals.

use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::cauchy::{self, pow2, CauchyReal, Modulus};
use crate::digit::SignedDigit;
use crate::error::Result;
use crate::stream::{DigitStream, Next};
use crate::Rational;

struct PrefixSums {
    cursor: DigitStream,
    digits: Vec<i8>,
    // (n, N) with seq(n) = N / 2^(n+1)
    last: Option<(u64, BigInt)>,
}

impl PrefixSums {
    fn numerator(&mut self, n: u64) -> BigInt {
        let len = n as usize + 1;
        while self.digits.len() < len {
            let (d, t) = self.cursor.destruct();
            self.digits.push(d.to_i8());
            self.cursor = t;
        }
        let (start, mut acc) = match self.last.take() {
            Some((m, acc)) if m <= n => (m as usize + 1, acc),
            _ => (0, BigInt::zero()),
        };
        // Fold 64 digits at a time; a chunk's value fits in an i128.
        for chunk in self.digits[start..len].chunks(64) {
            let mut word: i128 = 0;
            for &d in chunk {
                word = 2 * word + d as i128;
            }
            acc <<= chunk.len();
            acc += word;
        }
        self.last = Some((n, acc.clone()));
        acc
    }
}

/// `seq(n) = sum_{i<=n+1} d_i 2^-i` with the identity modulus.
///
/// `seq(n)` forces exactly `n + 1` digits; partial sums are extended
/// incrementally.
pub fn stream_to_cauchy(u: &DigitStream) -> CauchyReal {
    let state = Arc::new(Mutex::new(PrefixSums {
        cursor: u.clone(),
        digits: Vec::new(),
        last: None,
    }));
    CauchyReal::new(
        move |n| {
            let num = state.lock().unwrap_or_else(|e| e.into_inner()).numerator(n);
            Rational::new(num, pow2(n + 1))
        },
        Modulus::identity(),
    )
}

fn quarter() -> Rational {
    Rational::new(1.into(), 4.into())
}

fn choose_digit(a: &Rational) -> SignedDigit {
    let q = quarter();
    if *a <= -q.clone() {
        SignedDigit::Minus
    } else if *a <= q {
        SignedDigit::Zero
    } else {
        SignedDigit::Plus
    }
}

/// Splits `x` into `(d, y)` with `x = (y + d) / 2` and `|y| <= 1`, deciding
/// `d` from `seq(mod(3))`.
pub fn extract_digit(x: &CauchyReal) -> (SignedDigit, CauchyReal) {
    let d = choose_digit(&x.approx(3));
    (d, cauchy::scale2_c(x, d.into()))
}

/// Digits of `x`, one [`extract_digit`] step per position.
///
/// After `k` steps the remainder is `2^k x - c_k`, so the state is kept as
/// `(k, c_k)` instead of a chain of `k` nested reals.
pub fn cauchy_to_stream(x: &CauchyReal) -> DigitStream {
    let x = x.clone();
    DigitStream::corec((0u64, BigInt::zero()), move |(k, c)| {
        let n = x.modulus().at(3 + k);
        let a = x.seq(n) * pow2(k) - Rational::from_integer(c.clone());
        let d = choose_digit(&a);
        (d, Next::Continue((k + 1, (c << 1) + d.to_i8())))
    })
}

/// The digit stream of a rational in `[-1, 1]`.
pub fn stream_of_rational(q: Rational) -> Result<DigitStream> {
    let x = cauchy::cauchy_of_rational(q.clone())?;
    Ok(cauchy_to_stream(&x).with_exact(q))
}
