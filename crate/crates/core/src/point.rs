//! Compact exact storage for polytope vertices.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// A rational vector stored as `nums / den` in lowest terms (`den > 0`,
/// `gcd(den, nums...) = 1`), so equal vectors have equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactPoint {
    den: u32,
    nums: Box<[i32]>,
}

impl ExactPoint {
    pub fn from_integers(nums: Vec<i64>, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Overflow("zero denominator".into()));
        }
        let sign = if den < 0 { -1 } else { 1 };
        let mut g = den.abs();
        for &n in &nums {
            g = g.gcd(&n);
            if g == 1 {
                break;
            }
        }
        let den = den.abs() / g;
        let nums: Option<Vec<i32>> =
            nums.iter().map(|&n| i32::try_from(sign * n / g).ok()).collect();
        let nums = nums.ok_or_else(|| Error::Overflow("numerator exceeds i32".into()))?;
        let den = u32::try_from(den).map_err(|_| Error::Overflow("denominator exceeds u32".into()))?;
        Ok(Self { den, nums: nums.into_boxed_slice() })
    }

    pub fn from_rationals(coords: &[Rational]) -> Result<Self> {
        let mut lcm = BigInt::one();
        for c in coords {
            lcm = lcm.lcm(c.denom());
        }
        let den = lcm.to_i64().ok_or_else(|| Error::Overflow(format!("denominator {lcm}")))?;
        let nums: Option<Vec<i64>> = coords
            .iter()
            .map(|c| (c.numer() * (&lcm / c.denom())).to_i64())
            .collect();
        let nums = nums.ok_or_else(|| Error::Overflow("numerator exceeds i64".into()))?;
        Self::from_integers(nums, den)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nums.is_empty()
    }

    #[inline]
    pub fn den(&self) -> u32 {
        self.den
    }

    #[inline]
    pub fn nums(&self) -> &[i32] {
        &self.nums
    }

    pub fn coord(&self, i: usize) -> Rational {
        Rational::new(BigInt::from(self.nums[i]), BigInt::from(self.den))
    }

    pub fn to_rationals(&self) -> Vec<Rational> {
        (0..self.len()).map(|i| self.coord(i)).collect()
    }

    pub fn to_scalars<T: Scalar>(&self) -> Vec<T> {
        if T::EXACT {
            self.to_rationals().iter().map(T::from_rational).collect()
        } else {
            let d = T::from_ratio(self.den as i64, 1);
            self.nums.iter().map(|&n| T::from_ratio(n as i64, 1).div_ref(&d)).collect()
        }
    }

    pub fn write_f64(&self, out: &mut [f64]) {
        let d = self.den as f64;
        for (o, &n) in out.iter_mut().zip(self.nums.iter()) {
            *o = n as f64 / d;
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        let mut v = alloc::vec![0.0; self.len()];
        self.write_f64(&mut v);
        v
    }

    /// Exact dot product with rational coefficients.
    pub fn dot(&self, coeffs: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (c, &n) in coeffs.iter().zip(self.nums.iter()) {
            if n != 0 && !c.is_zero() {
                acc += c * BigInt::from(n);
            }
        }
        acc / BigInt::from(self.den)
    }

    /// Exact dot product with integer coefficients, returned as `(num, den)`.
    pub fn dot_i64(&self, coeffs: &[i64]) -> (i128, u32) {
        let num = coeffs
            .iter()
            .zip(self.nums.iter())
            .map(|(&c, &n)| c as i128 * n as i128)
            .sum();
        (num, self.den)
    }

    pub fn max_abs(&self) -> Rational {
        let m = self.nums.iter().map(|n| n.unsigned_abs()).max().unwrap_or(0);
        Rational::new(BigInt::from(m), BigInt::from(self.den))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nums.iter().all(|n| !n.is_negative())
    }
}
