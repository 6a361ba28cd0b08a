//! Scalar abstraction shared by the linear-algebra layer.
//!
//! Elimination-based routines (rank, determinant, nullspace, solve) are
//! written once against [`Scalar`] and run unchanged on `f32`, `f64` and
//! exact [`Rational`] entries. Routines that need square roots or
//! transcendental functions are bounded by [`num_traits::Float`] instead.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// A field element usable by the generic elimination routines.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Whether arithmetic on this type is exact.
    const EXACT: bool;

    /// Whether `self` should be treated as zero when eliminating against a
    /// column whose largest magnitude is `scale`.
    fn negligible(&self, scale: &Self) -> bool;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn negligible(&self, scale: &Self) -> bool {
        self.abs() <= 64.0 * f64::EPSILON * scale.abs().max(f64::MIN_POSITIVE)
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn negligible(&self, scale: &Self) -> bool {
        self.abs() <= 64.0 * f32::EPSILON * scale.abs().max(f32::MIN_POSITIVE)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn negligible(&self, _scale: &Self) -> bool {
        self.is_zero()
    }
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_from_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// by continued fractions with a final semiconvergent step.
pub fn snap_rational(x: f64, max_den: u64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let negative = x < 0.0;
    let mut rest = x.abs();
    // h/k convergents, kept in i128 to postpone overflow.
    let (mut h_prev, mut h) = (0i128, 1i128);
    let (mut k_prev, mut k) = (1i128, 0i128);
    let max_den = max_den as i128;
    for _ in 0..64 {
        let a = rest.floor();
        if a > 1e18 {
            break;
        }
        let a_int = a as i128;
        let h_next = a_int * h + h_prev;
        let k_next = a_int * k + k_prev;
        if k_next > max_den {
            // Largest admissible semiconvergent.
            let t = (max_den - k_prev) / k;
            if t > 0 {
                let h_semi = t * h + h_prev;
                let k_semi = t * k + k_prev;
                let semi_err = (h_semi as f64 / k_semi as f64 - x.abs()).abs();
                let conv_err = (h as f64 / k as f64 - x.abs()).abs();
                if semi_err < conv_err {
                    h = h_semi;
                    k = k_semi;
                }
            }
            break;
        }
        h_prev = h;
        k_prev = k;
        h = h_next;
        k = k_next;
        let frac = rest - a;
        if frac < 1e-15 {
            break;
        }
        rest = 1.0 / frac;
    }
    if k == 0 {
        return None;
    }
    let value = Rational::new(BigInt::from(h), BigInt::from(k));
    Some(if negative { -value } else { value })
}

/// Parses `"3"`, `"-2/5"`, `"0.125"` (terminating decimals) into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    if let Ok(n) = text.parse::<BigInt>() {
        return Some(Rational::from_integer(n));
    }
    // Plain decimal without exponent.
    let (sign, body) = match text.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_part, frac_part) = body.split_once('.')?;
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    Some(Rational::new(num * sign, den))
}

/// Least common multiple of the denominators of `values`.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Formats a rational as `p/q` or `p`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snap_recovers_small_fractions() {
        assert_eq!(snap_rational(0.625, 1_000_000), Some(rational(5, 8)));
        assert_eq!(snap_rational(2.0 / 3.0, 1_000_000), Some(rational(2, 3)));
        assert_eq!(snap_rational(-1.5, 10), Some(rational(-3, 2)));
        assert_eq!(snap_rational(0.0, 10), Some(rational(0, 1)));
    }

    #[test]
    fn snap_respects_denominator_bound() {
        let pi = snap_rational(std::f64::consts::PI, 1000).unwrap();
        assert!(pi.denom() <= &BigInt::from(1000));
        assert_eq!(pi, rational(355, 113));
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("8/5"), Some(rational(8, 5)));
        assert_eq!(parse_rational("-0.125"), Some(rational(-1, 8)));
        assert_eq!(parse_rational(" 7 "), Some(rational(7, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }
}
