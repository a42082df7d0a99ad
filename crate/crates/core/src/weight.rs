//! Exact nonnegative rational weights.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A nonnegative rational number in canonical reduced form.
///
/// Serialized as a `"p/q"` string (or `"p"` when the denominator is one) so
/// that exactness survives a round trip through JSON.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Weight(BigRational);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WeightError {
    #[error("malformed weight {0:?}")]
    Malformed(String),
    #[error("weight {0} is negative")]
    Negative(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

impl Weight {
    pub fn zero() -> Self {
        Weight(BigRational::zero())
    }

    pub fn one() -> Self {
        Weight(BigRational::one())
    }

    pub fn from_integer(n: u64) -> Self {
        Weight(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`, reduced. Panics if `den == 0`.
    pub fn ratio(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        Weight(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> Result<Self, WeightError> {
        if r.is_negative() {
            return Err(WeightError::Negative(r.to_string()));
        }
        Ok(Weight(r))
    }

    pub fn from_biguint(n: BigUint) -> Self {
        Weight(BigRational::from_integer(BigInt::from_biguint(
            Sign::Plus,
            n,
        )))
    }

    /// Nearest rational with a power-of-two denominator to a finite,
    /// nonnegative float. Used to bring sampled estimates back into the
    /// exact domain.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() || x < 0.0 {
            return None;
        }
        BigRational::from_float(x).map(Weight)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// `self - rhs` if the result stays nonnegative.
    pub fn checked_sub(&self, rhs: &Weight) -> Option<Weight> {
        if rhs.0 > self.0 {
            None
        } else {
            Some(Weight(&self.0 - &rhs.0))
        }
    }

    /// `self / rhs`, or `None` when `rhs` is zero.
    pub fn checked_div(&self, rhs: &Weight) -> Option<Weight> {
        if rhs.is_zero() {
            None
        } else {
            Some(Weight(&self.0 / &rhs.0))
        }
    }

    pub fn pow(&self, exp: u32) -> Weight {
        Weight(num_traits::pow(self.0.clone(), exp as usize))
    }

    pub fn recip(&self) -> Option<Weight> {
        if self.is_zero() {
            None
        } else {
            Some(Weight(self.0.recip()))
        }
    }

    /// Smallest integer `>= self`.
    pub fn ceil(&self) -> Weight {
        Weight(self.0.ceil())
    }

    pub fn floor(&self) -> Weight {
        Weight(self.0.floor())
    }

    pub fn to_f64(&self) -> f64 {
        // Huge numerators/denominators overflow a direct conversion, so
        // scale through the bit lengths first.
        if let Some(x) = self.0.to_f64() {
            if x.is_finite() && (x != 0.0 || self.is_zero()) {
                return x;
            }
        }
        let n = self.numer().bits() as i64;
        let d = self.denom().bits() as i64;
        let shift = n - d;
        let scaled = if shift > 0 {
            BigRational::new(self.numer().clone(), self.denom() << (shift as usize))
        } else {
            BigRational::new(self.numer() << ((-shift) as usize), self.denom().clone())
        };
        scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
    }

    /// Relative distance `|self - exact| / exact`; zero when both are zero.
    pub fn relative_error(&self, exact: &Weight) -> f64 {
        if exact.is_zero() {
            return if self.is_zero() { 0.0 } else { f64::INFINITY };
        }
        let diff = (&self.0 - &exact.0).abs() / &exact.0;
        Weight(diff).to_f64()
    }

    /// Bit size of the canonical representation.
    pub fn bits(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Weight {
    type Err = WeightError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (t, "1"),
        };
        let num: BigInt = num
            .parse()
            .map_err(|_| WeightError::Malformed(s.to_string()))?;
        let den: BigInt = den
            .parse()
            .map_err(|_| WeightError::Malformed(s.to_string()))?;
        if den.is_zero() {
            return Err(WeightError::ZeroDenominator(s.to_string()));
        }
        Weight::from_rational(BigRational::new(num, den))
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Weight> for Weight {
            type Output = Weight;
            fn $method(self, rhs: Weight) -> Weight {
                Weight(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Weight> for Weight {
            type Output = Weight;
            fn $method(self, rhs: &'a Weight) -> Weight {
                Weight(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $trait<Weight> for &'a Weight {
            type Output = Weight;
            fn $method(self, rhs: Weight) -> Weight {
                Weight((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Weight> for &'a Weight {
            type Output = Weight;
            fn $method(self, rhs: &'b Weight) -> Weight {
                Weight((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Mul, mul);

// Division by zero panics, as for the underlying rationals.
forward_binop!(Div, div);

impl AddAssign<&Weight> for Weight {
    fn add_assign(&mut self, rhs: &Weight) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Weight> for Weight {
    fn add_assign(&mut self, rhs: Weight) {
        self.0 += rhs.0;
    }
}

impl MulAssign<&Weight> for Weight {
    fn mul_assign(&mut self, rhs: &Weight) {
        self.0 *= &rhs.0;
    }
}

impl Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> Weight {
        iter.fold(Weight::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Weight> for Weight {
    fn sum<I: Iterator<Item = &'a Weight>>(iter: I) -> Weight {
        iter.fold(Weight::zero(), |a, b| a + b)
    }
}

impl Product for Weight {
    fn product<I: Iterator<Item = Weight>>(iter: I) -> Weight {
        iter.fold(Weight::one(), |a, b| a * b)
    }
}

impl<'a> Product<&'a Weight> for Weight {
    fn product<I: Iterator<Item = &'a Weight>>(iter: I) -> Weight {
        iter.fold(Weight::one(), |a, b| a * b)
    }
}

impl From<u64> for Weight {
    fn from(n: u64) -> Self {
        Weight::from_integer(n)
    }
}
