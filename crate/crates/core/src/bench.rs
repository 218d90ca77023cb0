//! Benchmark suites comparing the direct and indirect limit operators.
//!
//! Every timed run is validated against an oracle first; a wrong answer is
//! reported as an error instead of a timing.

use std::fmt::Write as _;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use num_traits::Signed;

use crate::apps::{mult_via_cauchy, mult_via_limit};
use crate::cauchy::{inv_pow2, Modulus};
use crate::digit::SignedDigit;
use crate::error::{Error, Result};
use crate::limit::LimitKind;
use crate::stream::{zeros, DigitStream, Next, ReadCounter};
use crate::Rational;

pub const CSV_HEADER: &str = "algorithm,param,digits,seconds,max_lookahead,trials";

/// Linear congruential generator with the MMIX constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lcg(u64);

impl Lcg {
    const A: u64 = 6364136223846793005;
    const C: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Lcg(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(Self::A).wrapping_add(Self::C);
        self.0
    }

    /// A digit from the high bits, `(x >> 33) mod 3 - 1`.
    pub fn next_digit(&mut self) -> SignedDigit {
        let r = (self.next_u64() >> 33) % 3;
        SignedDigit::from_int(r as i64 - 1).expect("residue mod 3")
    }
}

/// The pseudo-random digit stream generated from `seed`.
pub fn random_stream(seed: u64) -> DigitStream {
    DigitStream::corec(Lcg::new(seed), |mut g| {
        let d = g.next_digit();
        (d, Next::Continue(g))
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchResult {
    pub algorithm: String,
    pub param: String,
    pub digits: usize,
    pub seconds: f64,
    pub max_lookahead: usize,
    pub trials: usize,
}

impl BenchResult {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.6},{},{}",
            self.algorithm, self.param, self.digits, self.seconds, self.max_lookahead, self.trials
        )
    }
}

pub fn to_csv(rows: &[BenchResult]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}

/// One measured run: digits produced and the largest read count over the
/// input streams it touched.
struct Run {
    digits: Vec<SignedDigit>,
    lookahead: usize,
}

/// Runs `job` once as warm-up and `trials` more times, returning the median
/// wall time and the last run.
fn measure<F>(trials: usize, mut job: F) -> Result<(f64, Run)>
where
    F: FnMut() -> Result<Run>,
{
    job()?;
    let mut times = Vec::with_capacity(trials.max(1));
    let mut last = None;
    for _ in 0..trials.max(1) {
        let start = Instant::now();
        let run = job()?;
        times.push(start.elapsed().as_secs_f64());
        last = Some(run);
    }
    times.sort_by(|a, b| a.total_cmp(b));
    let median = times[times.len() / 2];
    Ok((median, last.expect("at least one trial")))
}

fn check_near(label: &str, got: &Rational, want: &Rational, tol: &Rational) -> Result<()> {
    if (got - want).abs() <= *tol {
        Ok(())
    } else {
        Err(Error::Invariant(format!(
            "{label}: {got} is not within {tol} of {want}"
        )))
    }
}

fn max_reads(counters: &[Arc<ReadCounter>]) -> usize {
    counters.iter().map(|c| c.reads()).max().unwrap_or(0)
}

/// Moduli of the constant-sequence test, by name.
pub fn constant_moduli() -> Vec<(&'static str, Modulus)> {
    vec![
        ("p", Modulus::identity()),
        ("p^2", Modulus::power(2)),
        ("p^3", Modulus::power(3)),
    ]
}

/// Limit of `F(n) = 0` for one modulus; returns the median time and the
/// digits read from the shared input stream.
pub fn time_constant(
    kind: LimitKind,
    m: &Modulus,
    digits: usize,
    trials: usize,
) -> Result<(f64, usize)> {
    let (secs, run) = measure(trials, || {
        let z = zeros();
        let counter = z.read_counter();
        let out = kind.limit(m, move |_| z.clone()).prefix(digits);
        Ok(Run {
            digits: out,
            lookahead: counter.reads(),
        })
    })?;
    let value = crate::digit::sum_digits(&run.digits);
    check_near(
        &format!("constant/{}", kind.name()),
        &value,
        &Rational::from_integer(0.into()),
        &inv_pow2(digits as u64),
    )?;
    Ok((secs, run.lookahead))
}

/// Direct and indirect limits of the constant zero sequence under the
/// moduli `p`, `p^2` and `p^3`.
pub fn bench_constant(digits: usize, trials: usize) -> Result<Vec<BenchResult>> {
    let mut rows = Vec::new();
    for (name, m) in constant_moduli() {
        for kind in [LimitKind::Direct, LimitKind::Indirect] {
            let (seconds, lookahead) = time_constant(kind, &m, digits, trials)?;
            rows.push(BenchResult {
                algorithm: format!("lim_{}", kind.name()),
                param: name.to_string(),
                digits,
                seconds,
                max_lookahead: lookahead,
                trials,
            });
        }
    }
    Ok(rows)
}

/// `x^(n+1)` for `x = 0 :: u`, each power computed once.
#[derive(Clone)]
pub struct Geometric {
    x: DigitStream,
    powers: Arc<Mutex<Vec<DigitStream>>>,
}

impl Geometric {
    pub fn new(u: &DigitStream) -> Self {
        let x = DigitStream::cons(SignedDigit::Zero, u.clone());
        Geometric {
            powers: Arc::new(Mutex::new(vec![x.clone()])),
            x,
        }
    }

    pub fn get(&self, n: u64) -> DigitStream {
        let mut ps = self.powers.lock().unwrap_or_else(|e| e.into_inner());
        while ps.len() as u64 <= n {
            let last = ps.last().expect("powers start with x").clone();
            ps.push(mult_via_cauchy(&self.x, &last));
        }
        ps[n as usize].clone()
    }
}

/// Limits of the geometric sequence `x^(n+1)`, `|x| <= 1/2`, which converges
/// to 0 with the identity modulus.
pub fn bench_geometric(digits: usize, trials: usize, seed: u64) -> Result<Vec<BenchResult>> {
    let mut rows = Vec::new();
    for kind in [LimitKind::Direct, LimitKind::Indirect] {
        let (seconds, run) = measure(trials, || {
            let u = random_stream(seed);
            let counter = u.read_counter();
            let g = Geometric::new(&u);
            let out = kind
                .limit(&Modulus::identity(), move |n| g.get(n))
                .prefix(digits);
            Ok(Run {
                digits: out,
                lookahead: counter.reads(),
            })
        })?;
        check_near(
            &format!("geometric/{}", kind.name()),
            &crate::digit::sum_digits(&run.digits),
            &Rational::from_integer(0.into()),
            &inv_pow2(digits as u64),
        )?;
        rows.push(BenchResult {
            algorithm: format!("lim_{}", kind.name()),
            param: "id".to_string(),
            digits,
            seconds,
            max_lookahead: run.lookahead,
            trials,
        });
    }
    Ok(rows)
}

/// The three multiplications.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultAlgorithm {
    Cauchy,
    LimitDirect,
    LimitIndirect,
}

impl MultAlgorithm {
    pub const ALL: [MultAlgorithm; 3] = [
        MultAlgorithm::Cauchy,
        MultAlgorithm::LimitDirect,
        MultAlgorithm::LimitIndirect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MultAlgorithm::Cauchy => "mult_cauchy",
            MultAlgorithm::LimitDirect => "mult_lim_direct",
            MultAlgorithm::LimitIndirect => "mult_lim_indirect",
        }
    }

    pub fn apply(self, u: &DigitStream, v: &DigitStream) -> DigitStream {
        match self {
            MultAlgorithm::Cauchy => mult_via_cauchy(u, v),
            MultAlgorithm::LimitDirect => mult_via_limit(u, v, LimitKind::Direct),
            MultAlgorithm::LimitIndirect => mult_via_limit(u, v, LimitKind::Indirect),
        }
    }
}

/// Seeds of the two factors used by [`bench_mult`].
pub fn mult_seeds(seed: u64) -> (u64, u64) {
    (seed, seed.wrapping_add(0x9e37_79b9_7f4a_7c15))
}

/// Times one multiplication on the seeded random pair; returns the median
/// time, the digits of the last run, and the largest input read count.
pub fn time_mult(
    alg: MultAlgorithm,
    digits: usize,
    trials: usize,
    seed: u64,
) -> Result<(f64, Vec<SignedDigit>, usize)> {
    let (su, sv) = mult_seeds(seed);
    let (secs, run) = measure(trials, || {
        let (u, v) = (random_stream(su), random_stream(sv));
        let counters = [u.read_counter(), v.read_counter()];
        let out = alg.apply(&u, &v).prefix(digits);
        Ok(Run {
            digits: out,
            lookahead: max_reads(&counters),
        })
    })?;
    // The factors' prefixes of length N pin the product to within 2 * 2^-N.
    let n = digits + 16;
    let exact = random_stream(su).approx(n) * random_stream(sv).approx(n);
    let tol = inv_pow2(digits as u64) + inv_pow2(n as u64) * Rational::from_integer(2.into());
    check_near(
        alg.name(),
        &crate::digit::sum_digits(&run.digits),
        &exact,
        &tol,
    )?;
    Ok((secs, run.digits, run.lookahead))
}

/// The three multiplications on seeded random streams.
pub fn bench_mult(digits: usize, trials: usize, seed: u64) -> Result<Vec<BenchResult>> {
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for alg in MultAlgorithm::ALL {
        let (seconds, out, lookahead) = time_mult(alg, digits, trials, seed)?;
        values.push(crate::digit::sum_digits(&out));
        rows.push(BenchResult {
            algorithm: alg.name().to_string(),
            param: format!("seed={seed}"),
            digits,
            seconds,
            max_lookahead: lookahead,
            trials,
        });
    }
    let tol = inv_pow2(digits as u64) * Rational::from_integer(2.into());
    for w in values.windows(2) {
        check_near("mult agreement", &w[0], &w[1], &tol)?;
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcg_is_deterministic() {
        let a: Vec<_> = {
            let mut g = Lcg::new(7);
            (0..5).map(|_| g.next_u64()).collect()
        };
        let mut g = Lcg::new(7);
        assert_eq!(a, (0..5).map(|_| g.next_u64()).collect::<Vec<_>>());
        assert_eq!(a[0], 7u64.wrapping_mul(Lcg::A).wrapping_add(Lcg::C));
        assert_eq!(random_stream(3).prefix(40), random_stream(3).prefix(40));
        assert_ne!(random_stream(3).prefix(40), random_stream(4).prefix(40));
    }

    #[test]
    fn random_digits_cover_the_alphabet() {
        let ds = random_stream(11).prefix(300);
        for d in SignedDigit::ALL {
            assert!(ds.contains(&d));
        }
    }

    #[test]
    fn csv_shape() {
        let rows = bench_constant(8, 1).unwrap();
        assert_eq!(rows.len(), 6);
        let csv = to_csv(&rows);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 7);
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 6));
    }

    #[test]
    fn geometric_powers_shrink() {
        let g = Geometric::new(&random_stream(5));
        for n in 0..6u64 {
            assert!(g.get(n).approx(20).abs() <= inv_pow2(n + 1) + inv_pow2(20));
        }
        let rows = bench_geometric(6, 1, 5).unwrap();
        assert_eq!(rows.len(), 2);
    }

    #[test]
    fn mult_bench_agrees() {
        let rows = bench_mult(6, 1, 1).unwrap();
        assert_eq!(rows.len(), 3);
    }
}
