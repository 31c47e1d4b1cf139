//! Numeric backends: exact big rationals and IEEE doubles.

use core::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, NumAssign, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// A field element usable as a probability / LP coefficient.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Signed + NumAssign + Send + Sync + 'static
{
    /// `true` for the rational backend.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_rational(r: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// Absolute tolerance for comparisons; zero for exact backends.
    fn tolerance() -> Self;

    /// `self -= a * b`.
    fn sub_mul_assign(&mut self, a: &Self, b: &Self);

    /// `self += a * b`.
    fn add_mul_assign(&mut self, a: &Self, b: &Self);

    fn mul_ref(&self, other: &Self) -> Self;

    fn div_ref(&self, other: &Self) -> Self;

    fn approx_zero(&self) -> bool {
        self.abs() <= Self::tolerance()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        let mut d = self.clone();
        d -= other.clone();
        d.approx_zero()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn tolerance() -> Self {
        1e-10
    }

    #[inline]
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }

    #[inline]
    fn add_mul_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    #[inline]
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    #[inline]
    fn div_ref(&self, other: &Self) -> Self {
        self / other
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn tolerance() -> Self {
        Rational::zero()
    }

    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self -= a * b;
    }

    fn add_mul_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self += a * b;
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn div_ref(&self, other: &Self) -> Self {
        self / other
    }

    fn approx_zero(&self) -> bool {
        self.is_zero()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// Exact conversion of a finite double (used for tests and tolerant input).
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_f64(x)
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

pub fn rational_int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `"p/q"`, `"p"` or a decimal literal like `"-0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() && int_digits.is_empty() {
            return None;
        }
        let mut digits = alloc::string::String::from(int_digits);
        digits.push_str(frac);
        if digits.is_empty() {
            return None;
        }
        let mut num: BigInt = digits.parse().ok()?;
        if neg {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Some(Rational::new(num, den));
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(n))
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> alloc::string::String {
    use alloc::string::ToString;
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6"), Some(rational(1, 2)));
        assert_eq!(parse_rational("-4"), Some(rational_int(-4)));
        assert_eq!(parse_rational("-0.25"), Some(rational(-1, 4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(format_rational(&rational(6, -4)), "-3/2");
        assert_eq!(format_rational(&rational_int(7)), "7");
    }

    #[test]
    fn tolerances() {
        assert!(1e-12f64.approx_zero());
        assert!(!rational(1, 1_000_000_000_000).approx_zero());
        assert!((0.1f64 + 0.2).approx_eq(&0.3));
    }
}
