//! Limits of convergent sequences of digit streams.
//!
//! `F` converges to `x` with modulus `M` when `|F(n) - x| <= 2^-p` for all
//! `n >= M(p)`. [`direct_limit`] works on digits alone; [`indirect_limit`]
//! goes through Cauchy reals and back.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::cauchy::{complete, CauchyReal, Modulus};
use crate::convert::{cauchy_to_stream, stream_to_cauchy};
use crate::ops::{double, quarter_shift, triple_cases, Sign, Triple};
use crate::stream::{DigitStream, Next};

/// How the direct limit re-indexes the sequence after emitting a digit.
///
/// After classifying `F(M(4))`, the next sequence is `n -> T(F(i(n)))` where
/// `i(n)` must be at least both `M(4)` and `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndexRule {
    /// `i(n) = M(4) + n`.
    Sum,
    /// `i(n) = max(M(4), n)`.
    Max,
}

impl IndexRule {
    #[inline]
    pub fn index(self, pivot: u64, n: u64) -> u64 {
        match self {
            IndexRule::Sum => pivot + n,
            IndexRule::Max => pivot.max(n),
        }
    }
}

/// The rule used by [`direct_limit`].
pub const DEFAULT_INDEX_RULE: IndexRule = IndexRule::Max;

type StreamFn = dyn Fn(u64) -> DigitStream + Send + Sync;

enum Source {
    Base(Arc<StreamFn>),
    Derived {
        parent: Arc<Level>,
        pivot: u64,
        class: Triple,
    },
}

/// The `k`-th sequence of the direct limit, memoized by index.
struct Level {
    source: Source,
    rule: IndexRule,
    cache: Mutex<HashMap<u64, DigitStream>>,
}

impl Level {
    fn new(source: Source, rule: IndexRule) -> Arc<Self> {
        Arc::new(Level {
            source,
            rule,
            cache: Mutex::new(HashMap::new()),
        })
    }

    fn get(&self, n: u64) -> DigitStream {
        if let Some(u) = self.cache.lock().unwrap_or_else(|e| e.into_inner()).get(&n) {
            return u.clone();
        }
        let u = match &self.source {
            Source::Base(f) => f(n).untagged(),
            Source::Derived {
                parent,
                pivot,
                class,
            } => rescale(*class, &parent.get(self.rule.index(*pivot, n))),
        };
        self.cache
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .entry(n)
            .or_insert(u)
            .clone()
    }
}

/// Maps `x` to `2x - d` for the digit `d` of `class`.
///
/// `R: 4(x/2 - 1/4)`, `L: 4(x/2 + 1/4)`, `M: 2x`.
pub fn rescale(class: Triple, u: &DigitStream) -> DigitStream {
    match class {
        Triple::R => double(&double(&quarter_shift(u, Sign::Minus))),
        Triple::L => double(&double(&quarter_shift(u, Sign::Plus))),
        Triple::M => double(u),
    }
}

/// The limit of `F` with modulus `M`, digit by digit.
///
/// At step `k` the current sequence is classified at index `M(4 + k)`; the
/// emitted digit is the class and the sequence is rescaled accordingly.
pub fn direct_limit<F>(m: &Modulus, f: F) -> DigitStream
where
    F: Fn(u64) -> DigitStream + Send + Sync + 'static,
{
    direct_limit_with(DEFAULT_INDEX_RULE, m, f)
}

pub fn direct_limit_with<F>(rule: IndexRule, m: &Modulus, f: F) -> DigitStream
where
    F: Fn(u64) -> DigitStream + Send + Sync + 'static,
{
    let m = m.clone();
    let base = Level::new(Source::Base(Arc::new(f)), rule);
    DigitStream::corec((0u64, base), move |(k, level)| {
        let pivot = m.at(4 + k);
        let class = triple_cases(&level.get(pivot));
        let next = Level::new(
            Source::Derived {
                parent: level,
                pivot,
                class,
            },
            rule,
        );
        (class.digit(), Next::Continue((k + 1, next)))
    })
}

/// The Cauchy real `complete(n -> F(n) as Cauchy, p -> M(p + 1))`.
///
/// Its modulus is `p -> max(M(p + 2), p + 2)`.
pub fn indirect_cauchy<F>(m: &Modulus, f: F) -> CauchyReal
where
    F: Fn(u64) -> DigitStream + Send + Sync + 'static,
{
    complete(move |n| stream_to_cauchy(&f(n)), m.shift(1))
}

/// The limit of `F` with modulus `M`, through Cauchy reals.
pub fn indirect_limit<F>(m: &Modulus, f: F) -> DigitStream
where
    F: Fn(u64) -> DigitStream + Send + Sync + 'static,
{
    cauchy_to_stream(&indirect_cauchy(m, f))
}

/// Which limit operator to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LimitKind {
    Direct,
    Indirect,
}

impl LimitKind {
    pub fn limit<F>(self, m: &Modulus, f: F) -> DigitStream
    where
        F: Fn(u64) -> DigitStream + Send + Sync + 'static,
    {
        match self {
            LimitKind::Direct => direct_limit(m, f),
            LimitKind::Indirect => indirect_limit(m, f),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LimitKind::Direct => "direct",
            LimitKind::Indirect => "indirect",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy::inv_pow2;
    use crate::convert::stream_of_rational;
    use crate::stream::{zeros, ReadCounter};
    use crate::Rational;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn close(u: &DigitStream, v: &Rational, n: usize) -> bool {
        (u.approx(n) - v).abs() <= inv_pow2(n as u64)
    }

    /// `n -> 1/3 - 2^-(n+2)`, within `2^-p` of 1/3 for `n >= p`.
    fn third_seq(n: u64) -> DigitStream {
        stream_of_rational(q(1, 3) - inv_pow2(n + 2)).unwrap()
    }

    #[test]
    fn constant_zero_limits() {
        let z = zeros();
        let f = move |_| z.clone();
        assert!(close(
            &direct_limit(&Modulus::constant(0), f.clone()),
            &q(0, 1),
            50
        ));
        assert!(close(
            &indirect_limit(&Modulus::constant(0), f.clone()),
            &q(0, 1),
            50
        ));
        assert!(close(&indirect_limit(&Modulus::power(2), f), &q(0, 1), 50));
    }

    #[test]
    fn constant_half_limit() {
        let h = stream_of_rational(q(1, 2)).unwrap();
        let u = direct_limit(&Modulus::constant(0), move |_| h.clone());
        assert!(close(&u, &q(1, 2), 40));
    }

    #[test]
    fn converging_to_a_third() {
        for rule in [IndexRule::Sum, IndexRule::Max] {
            let u = direct_limit_with(rule, &Modulus::identity(), third_seq);
            assert!(close(&u, &q(1, 3), 30), "{rule:?}");
        }
        assert!(close(
            &indirect_limit(&Modulus::identity(), third_seq),
            &q(1, 3),
            30
        ));
    }

    #[test]
    fn rescale_values() {
        for (v, class) in [
            (q(3, 4), Triple::R),
            (q(-1, 2), Triple::L),
            (q(1, 8), Triple::M),
        ] {
            let d = Rational::from_integer(i64::from(class.digit().to_i8()).into());
            let u = rescale(class, &stream_of_rational(v.clone()).unwrap());
            assert!(close(&u, &(v * num_bigint::BigInt::from(2) - d), 40));
        }
    }

    #[test]
    fn indirect_modulus_is_shifted_twice() {
        let m = Modulus::power(2);
        let x = indirect_cauchy(&m, |_| zeros());
        for p in 1..=20 {
            assert_eq!(x.modulus().at(p), m.at(p + 2).max(p + 2));
        }
    }

    type Log = Arc<Mutex<Vec<(u64, Arc<ReadCounter>)>>>;

    fn recorded(log: Log) -> impl Fn(u64) -> DigitStream + Send + Sync + 'static {
        move |n| {
            let u = zeros();
            log.lock().unwrap().push((n, u.read_counter()));
            u
        }
    }

    fn max_reads(log: &Mutex<Vec<(u64, Arc<ReadCounter>)>>) -> usize {
        log.lock()
            .unwrap()
            .iter()
            .map(|(_, c)| c.reads())
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn direct_lookahead_is_linear() {
        for n in [1usize, 10, 40] {
            let log = Arc::new(Mutex::new(Vec::new()));
            let _ = direct_limit(&Modulus::identity(), recorded(log.clone())).prefix(n);
            assert!(max_reads(&log) <= 3 * n + 3, "n = {n}");
        }
    }

    #[test]
    fn direct_touches_bounded_indices_for_constant_modulus() {
        let c = 3u64;
        let log = Arc::new(Mutex::new(Vec::new()));
        let n = 20;
        let _ = direct_limit_with(IndexRule::Sum, &Modulus::constant(c), recorded(log.clone()))
            .prefix(n);
        let top = log.lock().unwrap().iter().map(|(i, _)| *i).max().unwrap();
        assert!(top <= c * (n as u64 + 1));
    }

    #[test]
    fn indirect_lookahead_follows_modulus() {
        let n = 30usize;
        let log = Arc::new(Mutex::new(Vec::new()));
        let _ = indirect_limit(&Modulus::identity(), recorded(log.clone())).prefix(n);
        assert!(max_reads(&log) <= n + 4 + 4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn both_limits_agree(num in -60i64..=60, shift in 1u64..4) {
            // F(n) = a + (-1)^n 2^-(n+shift) with modulus identity.
            let a = q(num, 64);
            let target = a.clone();
            let f = move |n: u64| {
                let e = inv_pow2(n + shift);
                let v = if n % 2 == 0 { &target + e } else { &target - e };
                stream_of_rational(v).unwrap()
            };
            let depth = 24;
            let d = direct_limit(&Modulus::identity(), f.clone()).approx(depth);
            let i = indirect_limit(&Modulus::identity(), f).approx(depth);
            prop_assert!((&d - &a).abs() <= inv_pow2(depth as u64));
            prop_assert!((&i - &a).abs() <= inv_pow2(depth as u64));
            prop_assert!((d - i).abs() <= inv_pow2(depth as u64) * num_bigint::BigInt::from(2));
        }
    }
}
