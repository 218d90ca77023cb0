//! Cross-module checks on the public API.

use num_bigint::BigInt;
use num_traits::Signed;

use sdreal::apps::{heron, heron_rational, mult_via_cauchy, sqrt_stream};
use sdreal::cauchy::{complete, div_c, mul_c, Modulus};
use sdreal::convert::{cauchy_to_stream, stream_of_rational, stream_to_cauchy};
use sdreal::expr::{eval_digits, parse_expr};
use sdreal::ops::{average, divide};
use sdreal::Rational;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn tol(k: u64) -> Rational {
    Rational::new(1.into(), BigInt::from(1) << k)
}

#[test]
fn heron_stream_tracks_rational_iterates() {
    let x = q(9, 16);
    let u = stream_of_rational(x.clone()).unwrap();
    for n in 0..4 {
        let got = heron(&u, n).approx(24);
        let want = heron_rational(&x, n as u32);
        assert!((got - want).abs() <= tol(20), "n = {n}");
    }
}

#[test]
fn sqrt_of_a_square() {
    let u = stream_of_rational(q(49, 64)).unwrap();
    let got = sqrt_stream(&u).approx(24);
    assert!((got - q(7, 8)).abs() <= tol(24));
}

#[test]
fn stream_and_cauchy_division_agree() {
    let (x, y) = (q(-1, 3), q(5, 6));
    let (u, v) = (
        stream_of_rational(x.clone()).unwrap(),
        stream_of_rational(y.clone()).unwrap(),
    );
    let s = divide(&u, &v).approx(40);
    let c = cauchy_to_stream(&div_c(&stream_to_cauchy(&u), &stream_to_cauchy(&v))).approx(40);
    assert!((&s - &c).abs() <= tol(39));
    assert!((s - x / y).abs() <= tol(40));
}

#[test]
fn cauchy_product_of_averages() {
    let a = average(
        &stream_of_rational(q(1, 2)).unwrap(),
        &stream_of_rational(q(-1, 4)).unwrap(),
    );
    let b = stream_of_rational(q(2, 3)).unwrap();
    let via_stream = mult_via_cauchy(&a, &b).approx(32);
    let via_reals = mul_c(&stream_to_cauchy(&a), &stream_to_cauchy(&b)).approx(34);
    assert!((&via_stream - q(1, 12)).abs() <= tol(32));
    assert!((via_reals - q(1, 12)).abs() <= tol(34));
}

#[test]
fn completion_of_stream_sequence() {
    let m = Modulus::identity();
    let x = complete(
        |n| stream_to_cauchy(&stream_of_rational(q(1, 3) - tol(n + 2)).unwrap()),
        m,
    );
    for p in [4u64, 10, 20] {
        assert!((x.approx(p) - q(1, 3)).abs() <= tol(p));
    }
}

#[test]
fn expressions_compose() {
    let e = parse_expr("avg(mul_cauchy(1/2, 1/2), div(-1/8, 1/2))").unwrap();
    let r = eval_digits(&e, 30).unwrap();
    assert!((r.approx - q(0, 1)).abs() <= tol(30));
    assert!(r.enclosure.0 <= q(0, 1) && q(0, 1) <= r.enclosure.1);
}
