//! Arithmetic backends for quote dynamics.
//!
//! Every geometric operation on quotes is generic over [`Scalar`]. Two
//! backends are provided: `f64` for simulation, where domain inequalities
//! are relaxed by [`FLOAT_SLACK`], and [`BigRational`] for algebraic work,
//! where comparisons are exact.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};
use thiserror::Error;

/// Tolerance on domain inequalities in floating-point mode.
pub const FLOAT_SLACK: f64 = 1e-12;

pub trait Scalar: Num + Neg<Output = Self> + PartialOrd + Clone + Debug {
    /// Amount by which a domain inequality may be violated and still count as satisfied.
    fn slack() -> Self;

    fn approx(&self) -> f64;

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl Scalar for f64 {
    fn slack() -> Self {
        FLOAT_SLACK
    }

    fn approx(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn slack() -> Self {
        BigRational::zero()
    }

    fn approx(&self) -> f64 {
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => ToPrimitive::to_f64(self).unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {0:?} as an exact rational (expected `p/q`, an integer or a plain decimal)")]
pub struct ParseRatioError(pub String);

/// `numer / denom` as an exact rational.
///
/// Panics if `denom` is zero.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `p/q`, an integer, or a plain decimal such as `0.125` exactly.
pub fn parse_ratio(text: &str) -> Result<BigRational, ParseRatioError> {
    let err = || ParseRatioError(text.to_string());
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    let digits_ok = |s: &str| s.chars().all(|c| c.is_ascii_digit());
    if !digits_ok(int_part) || !digits_ok(frac_part) {
        return Err(err());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if all_digits.is_empty() {
        BigInt::zero()
    } else {
        all_digits.parse().map_err(|_| err())?
    };
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = BigRational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// Exact binary value of a finite float.
pub fn exact_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_ratio("1/3").unwrap(), ratio(1, 3));
        assert_eq!(parse_ratio(" 7/10 ").unwrap(), ratio(7, 10));
        assert_eq!(parse_ratio("0.5").unwrap(), ratio(1, 2));
        assert_eq!(parse_ratio("-2.25").unwrap(), ratio(-9, 4));
        assert_eq!(parse_ratio("12").unwrap(), ratio(12, 1));
        assert_eq!(parse_ratio(".5").unwrap(), ratio(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1/0", "abc", "1.2.3", "1e-3", "/"] {
            assert!(parse_ratio(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn float_conversion_is_exact_for_dyadics() {
        assert_eq!(exact_from_f64(0.5).unwrap(), ratio(1, 2));
        assert_eq!(ratio(32, 3).approx(), 32.0 / 3.0);
    }
}
