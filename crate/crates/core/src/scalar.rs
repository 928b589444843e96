//! Exact scalar types.
//!
//! Every computation in this crate is carried out over an exact field of
//! characteristic zero. [`Scalar`] collects the `num-traits` bounds the
//! algorithms need; it is implemented for arbitrary-precision rationals and
//! for the fixed-width `Ratio<i64>` / `Ratio<i128>` types, which are faster but
//! can overflow on large pieces.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Num;

/// An exact field element.
///
/// Floating point types deliberately do not implement this trait: kernels and
/// subspace comparisons are decided by exact equality with zero.
pub trait Scalar:
    'static + Clone + PartialEq + PartialOrd + Debug + Display + Num + Neg<Output = Self> + Send + Sync
{
    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// `n!` as a scalar.
    fn factorial(n: u32) -> Self {
        (1..=n as i64).fold(Self::one(), |acc, j| acc * Self::from_i64(j))
    }

    /// Multiplicative inverse. Panics on zero.
    fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Self::one() / self.clone()
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(BigInt::from(v))
    }
}

impl Scalar for Ratio<i64> {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v)
    }
}

impl Scalar for Ratio<i128> {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn factorials() {
        assert_eq!(BigRational::factorial(0), BigRational::one());
        assert_eq!(BigRational::factorial(5), BigRational::from_i64(120));
        assert_eq!(Ratio::<i64>::factorial(4), Ratio::from_integer(24));
    }

    #[test]
    fn ratio_is_reduced() {
        let r = BigRational::from_ratio(6, -4);
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(r.inv(), BigRational::from_ratio(-2, 3));
    }
}
