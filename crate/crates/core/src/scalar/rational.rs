//! Exact rational scalars and their text forms.
//!
//! Matrix files accept entries as integers, `"num/den"` strings, or decimal
//! strings; all of them map losslessly onto [`Rational`].

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

pub type Rational = num_rational::BigRational;

/// Parse an integer, `num/den`, or decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, RationalParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(RationalParseError(s.to_owned()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| RationalParseError(s.to_owned()))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| RationalParseError(s.to_owned()))?;
        if d.is_zero() {
            return Err(RationalParseError(s.to_owned()));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        // decimal literal: int.frac == (int*10^k + frac) / 10^k
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(RationalParseError(s.to_owned()));
        }
        let negative = int_part.starts_with('-');
        let int: BigInt = if int_part == "-" || int_part.is_empty() {
            BigInt::zero()
        } else {
            int_part
                .parse()
                .map_err(|_| RationalParseError(s.to_owned()))?
        };
        let frac: BigInt = frac_part
            .parse()
            .map_err(|_| RationalParseError(s.to_owned()))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let mag =
            BigInt::from(int.magnitude().clone()) * &scale + BigInt::from(frac.magnitude().clone());
        let signed = if negative { -mag } else { mag };
        return Ok(Rational::new(signed, scale));
    }
    let n: BigInt = s.parse().map_err(|_| RationalParseError(s.to_owned()))?;
    Ok(Rational::from(n))
}

/// Render exactly: integers bare, everything else as `num/den`.
pub fn rational_to_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a valid rational literal: {0:?}")]
pub struct RationalParseError(pub String);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_three_forms() {
        assert_eq!(
            parse_rational("42").unwrap(),
            Rational::from(BigInt::from(42))
        );
        assert_eq!(
            parse_rational("-3/6").unwrap(),
            Rational::new(BigInt::from(-1), BigInt::from(2))
        );
        assert_eq!(
            parse_rational("0.25").unwrap(),
            Rational::new(BigInt::from(1), BigInt::from(4))
        );
        assert_eq!(
            parse_rational("-1.5").unwrap(),
            Rational::new(BigInt::from(-3), BigInt::from(2))
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a.b").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn round_trips() {
        for s in ["7", "-7", "22/7", "-1/3"] {
            let q = parse_rational(s).unwrap();
            assert_eq!(parse_rational(&rational_to_string(&q)).unwrap(), q);
        }
    }
}
