//! Extended-precision binary floating point.
//!
//! `Real` wraps a binary big-float with round-to-nearest-even and an explicit
//! significand width in bits. Every constructor takes the target width; values
//! produced by arithmetic inherit the wider of the two operand widths, so a
//! computation seeded at `bits` stays at `bits` throughout.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use dashu_base::SquareRoot;
use dashu_float::round::mode::{HalfAway, HalfEven};
use dashu_float::FBig;
use dashu_int::IBig;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::rational::Rational;

type Fx = FBig<HalfEven, 2>;
type Dec = FBig<HalfAway, 10>;

/// Default significand width used across the crate.
pub const DEFAULT_BITS: usize = 128;

/// Extended-precision real number (binary significand, explicit width).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Real(Fx);

fn ibig_from_bigint(n: &BigInt) -> IBig {
    // round-trips through the little-endian magnitude bytes
    let (sign, bytes) = n.to_bytes_le();
    let mag = dashu_int::UBig::from_le_bytes(&bytes);
    let sign = match sign {
        num_bigint::Sign::Minus => dashu_base::Sign::Negative,
        _ => dashu_base::Sign::Positive,
    };
    IBig::from_parts(sign, mag)
}

fn bigint_from_ibig(n: &IBig) -> BigInt {
    let (sign, mag) = n.clone().into_parts();
    let sign = match sign {
        dashu_base::Sign::Negative => num_bigint::Sign::Minus,
        dashu_base::Sign::Positive => num_bigint::Sign::Plus,
    };
    BigInt::from_bytes_le(sign, &mag.to_le_bytes())
}

impl Real {
    pub fn zero() -> Self {
        Real(Fx::ZERO)
    }

    pub fn one() -> Self {
        Real(Fx::ONE)
    }

    pub fn from_u64(v: u64, bits: usize) -> Self {
        Real(Fx::from(v).with_precision(bits).value())
    }

    pub fn from_i64(v: i64, bits: usize) -> Self {
        Real(Fx::from(v).with_precision(bits).value())
    }

    /// Exact embedding of an `f64` (must be finite), widened to `bits`.
    pub fn from_f64(v: f64, bits: usize) -> Self {
        let f = Fx::try_from(v).expect("finite f64 required");
        Real(f.with_precision(bits).value())
    }

    /// `num / den` rounded to `bits`.
    pub fn from_rational(q: &Rational, bits: usize) -> Self {
        let num = Fx::from(ibig_from_bigint(q.numer()))
            .with_precision(bits)
            .value();
        let den = Fx::from(ibig_from_bigint(q.denom()))
            .with_precision(bits)
            .value();
        Real(num / den)
    }

    /// Exact power of two, `2^exp`.
    pub fn pow2(exp: isize, bits: usize) -> Self {
        Real(Fx::from_parts(IBig::ONE, exp).with_precision(bits).value())
    }

    /// Significand width carried by this value (0 means unbounded).
    pub fn bits(&self) -> usize {
        self.0.precision()
    }

    pub fn with_bits(&self, bits: usize) -> Self {
        Real(self.0.clone().with_precision(bits).value())
    }

    pub fn is_zero(&self) -> bool {
        self.0.repr().is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0 < Fx::ZERO
    }

    pub fn is_positive(&self) -> bool {
        self.0 > Fx::ZERO
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Self {
        Real::one() / self.clone()
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.sqrt())
    }

    pub fn powi(&self, exp: i64) -> Self {
        if exp < 0 {
            self.powi(-exp).recip()
        } else {
            Real(self.0.powi(IBig::from(exp)))
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn floor_bigint(&self) -> BigInt {
        bigint_from_ibig(&self.0.floor().to_int().value())
    }

    pub fn ceil_bigint(&self) -> BigInt {
        bigint_from_ibig(&self.0.ceil().to_int().value())
    }

    /// Nearest integer (ties to even).
    pub fn round_bigint(&self) -> BigInt {
        bigint_from_ibig(&self.0.to_int().value())
    }

    /// Lossy conversion, rounding to nearest.
    pub fn to_f64(&self) -> f64 {
        self.0.repr().to_f64().value()
    }

    /// Parse a decimal literal (`"2.5"`, `"1e-3"`, `"-0.125"`) at `bits`.
    pub fn parse_decimal(s: &str, bits: usize) -> Result<Self, dashu_base::ParseError> {
        let dec = Dec::from_str(s.trim())?;
        // raise the decimal precision first (exact), otherwise the radix
        // conversion would round at the literal's digit count
        let digits = Self::decimal_digits_for(bits) + 8;
        let dec = dec.with_precision(digits).value();
        let bin = dec.to_binary().value().with_rounding::<HalfEven>();
        Ok(Real(bin.with_precision(bits).value()))
    }

    /// Decimal string with `digits` significant digits, zero-padded so exact
    /// values still carry the full digit count.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let limited = if self.0.precision() == 0 {
            // unbounded values (e.g. integer constants) must be bounded before
            // a radix change
            self.0.clone().with_precision(4 * digits + 64).value()
        } else {
            self.0.clone()
        };
        let dec = limited.to_decimal().value();
        let mut s = format!("{}", dec.with_precision(digits).value());
        if s.contains(['e', 'E']) {
            return s;
        }
        let significant = s
            .chars()
            .filter(char::is_ascii_digit)
            .collect::<String>()
            .trim_start_matches('0')
            .len();
        if significant < digits {
            if !s.contains('.') {
                s.push('.');
            }
            s.extend(std::iter::repeat_n('0', digits - significant.max(1)));
        }
        s
    }

    /// Number of decimal digits that `bits` of significand can support.
    pub fn decimal_digits_for(bits: usize) -> usize {
        ((bits as f64) * std::f64::consts::LOG10_2).ceil() as usize
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits = if self.bits() == 0 {
            DEFAULT_BITS
        } else {
            self.bits()
        };
        write!(
            f,
            "{}",
            self.to_decimal_string(Real::decimal_digits_for(bits))
        )
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({} @{}b)", self, self.bits())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                Real($trait::$method(self.0, rhs.0))
            }
        }

        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real($trait::$method(self.0.clone(), rhs.0.clone()))
            }
        }

        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real($trait::$method(self.0, rhs.0.clone()))
            }
        }

        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                Real($trait::$method(self.0.clone(), rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0.clone())
    }
}

impl Zero for Real {
    fn zero() -> Self {
        Real::zero()
    }

    fn is_zero(&self) -> bool {
        Real::is_zero(self)
    }
}

impl One for Real {
    fn one() -> Self {
        Real::one()
    }
}

impl PartialEq<u64> for Real {
    fn eq(&self, other: &u64) -> bool {
        self.0 == Fx::from(*other)
    }
}

impl PartialOrd<u64> for Real {
    fn partial_cmp(&self, other: &u64) -> Option<Ordering> {
        self.0.partial_cmp(&Fx::from(*other))
    }
}
