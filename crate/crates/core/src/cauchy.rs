//! Cauchy reals: a rational sequence with a modulus of convergence.
//!
//! `x` is represented by `(seq, m)` when `|x - seq(n)| < 2^-(p+1)` for all
//! `n >= m(p)`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::Rational;

/// A monotone map from precision exponents `p >= 1` to sequence indices.
#[derive(Clone)]
pub struct Modulus(Arc<dyn Fn(u64) -> u64 + Send + Sync>);

impl Modulus {
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(u64) -> u64 + Send + Sync + 'static,
    {
        Modulus(Arc::new(f))
    }

    /// `p -> p`.
    pub fn identity() -> Self {
        Modulus::from_fn(|p| p)
    }

    /// `p -> c`.
    pub fn constant(c: u64) -> Self {
        Modulus::from_fn(move |_| c)
    }

    /// `p -> p^k`, saturating.
    pub fn power(k: u32) -> Self {
        Modulus::from_fn(move |p| p.saturating_pow(k))
    }

    #[inline]
    pub fn at(&self, p: u64) -> u64 {
        (self.0)(p)
    }

    /// `p -> self(p + k)`.
    pub fn shift(&self, k: u64) -> Self {
        let inner = self.clone();
        Modulus::from_fn(move |p| inner.at(p + k))
    }

    /// `p -> max(self(p), other(p))`.
    pub fn max(&self, other: &Modulus) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Modulus::from_fn(move |p| a.at(p).max(b.at(p)))
    }

    /// Checks `m(p) <= m(p+1)` for `p` in `1..=upto`.
    pub fn is_monotone_up_to(&self, upto: u64) -> bool {
        (1..upto).all(|p| self.at(p) <= self.at(p + 1))
    }
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sample: Vec<u64> = (1..=4).map(|p| self.at(p)).collect();
        write!(f, "Modulus({sample:?}..)")
    }
}

type Seq = Arc<dyn Fn(u64) -> Rational + Send + Sync>;

/// A real given by a rational Cauchy sequence and its modulus.
#[derive(Clone)]
pub struct CauchyReal {
    seq: Seq,
    modulus: Modulus,
}

impl CauchyReal {
    pub fn new<F>(seq: F, modulus: Modulus) -> Self
    where
        F: Fn(u64) -> Rational + Send + Sync + 'static,
    {
        CauchyReal {
            seq: Arc::new(seq),
            modulus,
        }
    }

    #[inline]
    pub fn seq(&self, n: u64) -> Rational {
        (self.seq)(n)
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// `seq(mod(p))`, within `2^-(p+1)` of the denoted real.
    pub fn approx(&self, p: u64) -> Rational {
        self.seq(self.modulus.at(p))
    }
}

impl fmt::Debug for CauchyReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CauchyReal")
            .field("modulus", &self.modulus)
            .finish_non_exhaustive()
    }
}

pub(crate) fn check_unit(q: &Rational) -> Result<()> {
    if q.abs() > Rational::one() {
        Err(Error::OutOfRange(Box::new(q.clone())))
    } else {
        Ok(())
    }
}

pub(crate) fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

pub(crate) fn inv_pow2(k: u64) -> Rational {
    Rational::new(BigInt::one(), pow2(k))
}

/// The constant sequence `q` with modulus `p -> 0`.
pub fn cauchy_of_rational(q: Rational) -> Result<CauchyReal> {
    check_unit(&q)?;
    Ok(CauchyReal::new(move |_| q.clone(), Modulus::constant(0)))
}

/// Which side of an approximate comparison holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `x <= b`.
    Left,
    /// `a <= x`.
    Right,
}

/// Decides `x <= b` or `a <= x` for rationals `a < b`.
///
/// Takes the least `p >= 1` with `2^-p < b - a` and compares `seq(m(p+1))`
/// with the midpoint; ties go left.
pub fn approx_split_rat(x: &CauchyReal, a: &Rational, b: &Rational) -> Result<Side> {
    if a >= b {
        return Err(Error::EmptyInterval {
            a: Box::new(a.clone()),
            b: Box::new(b.clone()),
        });
    }
    let width = b - a;
    let mut p = 1u64;
    while inv_pow2(p) >= width {
        p += 1;
    }
    let mid = (a + b) / BigInt::from(2);
    if x.seq(x.modulus().at(p + 1)) <= mid {
        Ok(Side::Left)
    } else {
        Ok(Side::Right)
    }
}

/// The limit of a Cauchy sequence of reals `xs` with modulus `m`.
///
/// `seq(n) = xs(n).seq(xs(n).mod(max(n, 1)))` and
/// `mod(p) = max(m(p+1), p+2)`.
pub fn complete<F>(xs: F, m: Modulus) -> CauchyReal
where
    F: Fn(u64) -> CauchyReal + Send + Sync + 'static,
{
    let modulus = Modulus::from_fn(move |p| m.at(p + 1).max(p + 2));
    CauchyReal::new(
        move |n| {
            let x = xs(n);
            x.seq(x.modulus().at(n.max(1)))
        },
        modulus,
    )
}

/// `x + y`.
pub fn add_c(x: &CauchyReal, y: &CauchyReal) -> CauchyReal {
    let (a, b) = (x.clone(), y.clone());
    CauchyReal::new(
        move |n| a.seq(n) + b.seq(n),
        x.modulus().shift(1).max(&y.modulus().shift(1)),
    )
}

/// `-x`.
pub fn neg_c(x: &CauchyReal) -> CauchyReal {
    let a = x.clone();
    CauchyReal::new(move |n| -a.seq(n), x.modulus().clone())
}

/// `x - y`.
pub fn sub_c(x: &CauchyReal, y: &CauchyReal) -> CauchyReal {
    add_c(x, &neg_c(y))
}

/// `2x - d`.
pub fn scale2_c(x: &CauchyReal, d: i64) -> CauchyReal {
    let a = x.clone();
    let d = Rational::from_integer(d.into());
    CauchyReal::new(
        move |n| a.seq(n) * BigInt::from(2) - &d,
        x.modulus().shift(1),
    )
}

/// `x * y` for `|x|, |y| <= 1`.
pub fn mul_c(x: &CauchyReal, y: &CauchyReal) -> CauchyReal {
    let (a, b) = (x.clone(), y.clone());
    CauchyReal::new(
        move |n| a.seq(n) * b.seq(n),
        x.modulus().shift(2).max(&y.modulus().shift(2)),
    )
}

/// Shift applied to both moduli by [`div_c`].
pub const DIV_SHIFT: u64 = 7;

/// `x / y` for `|x| <= y` and `y >= 1/4`. The denominator is clamped at 1/8.
pub fn div_c(x: &CauchyReal, y: &CauchyReal) -> CauchyReal {
    let (a, b) = (x.clone(), y.clone());
    let floor = Rational::new(BigInt::one(), BigInt::from(8));
    CauchyReal::new(
        move |n| {
            let den = b.seq(n);
            let den = if den < floor { floor.clone() } else { den };
            a.seq(n) / den
        },
        x.modulus()
            .shift(DIV_SHIFT)
            .max(&y.modulus().shift(DIV_SHIFT)),
    )
}

/// `|x - q| < 2^-(p+1)` at index `mod(p)`.
pub fn within_contract(x: &CauchyReal, q: &Rational, p: u64) -> bool {
    (x.approx(p) - q).abs() < inv_pow2(p + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn arb_unit() -> impl Strategy<Value = Rational> {
        (1i64..=64).prop_flat_map(|d| (-d..=d).prop_map(move |n| q(n, d)))
    }

    /// A sequence converging to `target` at rate `2^-(n+2)` from above,
    /// clipped so every term stays in `[-1, 1]`.
    fn converging(target: Rational) -> CauchyReal {
        CauchyReal::new(
            move |n| {
                let t = &target + inv_pow2(n + 2);
                if t > Rational::one() {
                    Rational::one()
                } else {
                    t
                }
            },
            Modulus::identity(),
        )
    }

    #[test]
    fn rational_embedding() {
        let z = cauchy_of_rational(q(0, 1)).unwrap();
        assert_eq!(z.seq(7), q(0, 1));
        let t = cauchy_of_rational(q(1, 3)).unwrap();
        assert_eq!(t.modulus().at(5), 0);
        assert_eq!(
            cauchy_of_rational(q(3, 2)).unwrap_err(),
            Error::OutOfRange(Box::new(q(3, 2)))
        );
    }

    #[test]
    fn modulus_constructors() {
        assert_eq!(Modulus::identity().at(9), 9);
        assert_eq!(Modulus::power(3).at(4), 64);
        assert_eq!(Modulus::constant(5).shift(10).at(1), 5);
        assert_eq!(Modulus::identity().shift(3).at(2), 5);
        assert!(Modulus::power(2).is_monotone_up_to(100));
        assert!(!Modulus::from_fn(|p| 10 - p.min(10)).is_monotone_up_to(5));
    }

    #[test]
    fn split_examples() {
        let half = q(1, 2);
        let zero = q(0, 1);
        let at = |v: Rational| approx_split_rat(&cauchy_of_rational(v).unwrap(), &zero, &half);
        assert_eq!(at(q(0, 1)).unwrap(), Side::Left);
        assert_eq!(at(q(1, 1)).unwrap(), Side::Right);
        assert_eq!(at(q(1, 4)).unwrap(), Side::Left);
    }

    #[test]
    fn split_special_case_reads_mod_three() {
        // For (0, 1/2) the least p with 2^-p < 1/2 is 2, so the index is m(3).
        let x = CauchyReal::new(
            |n| if n == 30 { q(1, 1) } else { q(-1, 1) },
            Modulus::from_fn(|p| p * 10),
        );
        assert_eq!(
            approx_split_rat(&x, &q(0, 1), &q(1, 2)).unwrap(),
            Side::Right
        );
    }

    #[test]
    fn split_rejects_empty_interval() {
        let x = cauchy_of_rational(q(0, 1)).unwrap();
        assert!(approx_split_rat(&x, &q(1, 2), &q(1, 2)).is_err());
        assert!(approx_split_rat(&x, &q(1, 2), &q(0, 1)).is_err());
    }

    #[test]
    fn complete_examples() {
        let zero = complete(
            |_| cauchy_of_rational(q(0, 1)).unwrap(),
            Modulus::identity(),
        );
        assert_eq!(zero.modulus().at(3), 5);
        assert_eq!(zero.seq(12), q(0, 1));
        let m = Modulus::power(2);
        let c = complete(|_| cauchy_of_rational(q(0, 1)).unwrap(), m.clone());
        assert_eq!(c.modulus().at(1), m.at(2).max(3));

        let one = complete(
            |n| cauchy_of_rational(Rational::one() - inv_pow2(n)).unwrap(),
            Modulus::identity(),
        );
        for n in 1..40 {
            assert!((one.seq(n) - Rational::one()).abs() <= inv_pow2(n));
        }
        for p in 1..30 {
            assert!(within_contract(&one, &Rational::one(), p));
        }
    }

    #[test]
    fn complete_modulus_formula() {
        let m = Modulus::power(3);
        let c = complete(|_| cauchy_of_rational(q(0, 1)).unwrap(), m.clone());
        for p in 1..=20 {
            assert_eq!(c.modulus().at(p), m.at(p + 1).max(p + 2));
        }
    }

    #[test]
    fn arithmetic_examples() {
        let x = cauchy_of_rational(q(1, 4)).unwrap();
        let y = cauchy_of_rational(q(1, 2)).unwrap();
        let quotient = div_c(&x, &y);
        let diff = add_c(&x, &neg_c(&x));
        let doubled = scale2_c(&x, 0);
        for p in 1..40 {
            assert!(within_contract(&quotient, &q(1, 2), p));
            assert!(within_contract(&diff, &q(0, 1), p));
            assert!(within_contract(&doubled, &q(1, 2), p));
        }
    }

    proptest! {
        #[test]
        fn split_is_sound(v in arb_unit(), a in arb_unit(), w in 1i64..64) {
            let b = &a + q(w, 64);
            let x = cauchy_of_rational(v.clone()).unwrap();
            match approx_split_rat(&x, &a, &b).unwrap() {
                Side::Left => prop_assert!(v <= b),
                Side::Right => prop_assert!(a <= v),
            }
        }

        #[test]
        fn split_is_sound_on_converging_sequences(v in arb_unit(), a in arb_unit(), w in 1i64..64) {
            let b = &a + q(w, 64);
            let x = converging(v.clone());
            match approx_split_rat(&x, &a, &b).unwrap() {
                Side::Left => prop_assert!(v <= b),
                Side::Right => prop_assert!(a <= v),
            }
        }

        #[test]
        fn arithmetic_meets_contract(a in arb_unit(), b in arb_unit(), p in 1u64..48) {
            let (x, y) = (converging(a.clone()), converging(b.clone()));
            prop_assert!(within_contract(&add_c(&x, &y), &(&a + &b), p));
            prop_assert!(within_contract(&sub_c(&x, &y), &(&a - &b), p));
            prop_assert!(within_contract(&mul_c(&x, &y), &(&a * &b), p));
            prop_assert!(within_contract(&scale2_c(&x, 1), &(&a * BigInt::from(2) - BigInt::from(1)), p));
        }

        #[test]
        fn division_meets_contract(num in -64i64..=64, den in 16i64..=64, p in 1u64..48) {
            let y = q(den, 64);
            let x = &y * q(num, 64);
            let quotient = div_c(&converging(x.clone()), &converging(y.clone()));
            prop_assert!(within_contract(&quotient, &(&x / &y), p));
        }

        #[test]
        fn cauchy_consequence(a in arb_unit(), p in 1u64..30, i in 0u64..20, j in 0u64..20) {
            let x = converging(a);
            let m = x.modulus().at(p);
            prop_assert!((x.seq(m + i) - x.seq(m + j)).abs() <= inv_pow2(p));
        }

        #[test]
        fn complete_of_rational_limits(a in arb_unit(), p in 1u64..30) {
            // xs(n) = a + 2^-(n+2) (clipped) converges to a with modulus identity.
            let target = a.clone();
            let c = complete(
                move |n| {
                    let t = &target + inv_pow2(n + 2);
                    cauchy_of_rational(if t > Rational::one() { Rational::one() } else { t }).unwrap()
                },
                Modulus::identity(),
            );
            let m = c.modulus().at(p);
            prop_assert!((c.seq(m) - &a).abs() <= inv_pow2(p + 1));
        }
    }
}
