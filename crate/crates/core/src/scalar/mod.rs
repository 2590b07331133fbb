//! Scalar types: exact rationals and extended-precision reals.

mod complex;
mod rational;
mod real;
mod trig;

pub use complex::{roots_of_unity, Complex};
pub use rational::{parse_rational, rational_to_string, Rational, RationalParseError};
pub use real::{Real, DEFAULT_BITS};
pub use trig::{pi, sin_cos};
