use thiserror::Error;

use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("rational {0} lies outside [-1, 1]")]
    OutOfRange(Box<Rational>),
    #[error("empty interval: {a} is not below {b}")]
    EmptyInterval { a: Box<Rational>, b: Box<Rational> },
    #[error("expected a positive integer, got {0}")]
    NotPositive(u64),
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("precondition violated in `{expr}`: {msg}")]
    Precondition { expr: String, msg: String },
    #[error("internal invariant failed: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
