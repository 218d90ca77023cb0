//! Exact real arithmetic on `[-1, 1]` with binary signed-digit streams and
//! modulated Cauchy sequences.
//!
//! Streams ([`DigitStream`]) are lazy and memoized; Cauchy reals
//! ([`CauchyReal`]) pair a rational sequence with a modulus of convergence.
//! The two representations translate into each other ([`convert`]), and
//! limits of convergent stream sequences can be taken either directly on
//! digits or through the Cauchy side ([`limit`]).

pub mod apps;
pub mod bench;
pub mod cauchy;
pub mod convert;
pub mod digit;
pub mod error;
pub mod expr;
pub mod limit;
pub mod ops;
pub mod stream;

/// Arbitrary-precision, always normalized fraction.
pub type Rational = num_rational::BigRational;

pub use cauchy::{CauchyReal, Modulus, Side};
pub use digit::{DigitList, SignedDigit};
pub use error::Error;
pub use stream::{DigitStream, Next};
