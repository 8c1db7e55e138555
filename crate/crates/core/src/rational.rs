//! The coefficient field: arbitrary-precision rationals.
//!
//! `Rational` is backed by `num_rational::BigRational`, which keeps every
//! value reduced to lowest terms with a positive denominator (zero is 0/1).
//! No floating point is allowed anywhere in the engine.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::EngineError;

pub type Rational = num_rational::BigRational;

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse a fraction string `"p"` or `"p/q"`.
pub fn parse(s: &str) -> Result<Rational, EngineError> {
    let s = s.trim();
    let bad = || EngineError::Parse(format!("invalid fraction: {s:?}"));
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
    }
}

/// Render as `"p"` for integers and `"p/q"` otherwise.
pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// True when the value is an integer with |value| <= bound; used by sanity
/// assertions in tests.
pub fn is_small_int(r: &Rational, bound: i64) -> bool {
    r.denom().is_one() && r.numer().abs() <= BigInt::from(bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "7", "-3", "1/2", "-5/6", "22/7"] {
            let r = parse(s).unwrap();
            assert_eq!(format(&r), s);
        }
        assert_eq!(format(&parse(" 4/8 ").unwrap()), "1/2");
        assert_eq!(format(&parse("3/-6").unwrap()), "-1/2");
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["", "a", "1/0", "1//2", "1.5"] {
            assert!(parse(s).is_err(), "accepted {s:?}");
        }
    }

    #[test]
    fn reduced_with_positive_denominator() {
        let r = frac(-4, -6);
        assert_eq!(r, frac(2, 3));
        assert!(r.denom() > &BigInt::from(0));
        assert!(zero().denom().is_one());
    }
}
