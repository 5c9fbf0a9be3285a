//! Arbitrary-precision rational numbers.
//!
//! Thin wrapper over `num_rational::BigRational` fixing the normalization
//! contract (reduced, denominator positive, zero is `0/1`) and turning
//! division by zero into an [`Error`](crate::Error) instead of a panic.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Arbitrary-precision integer used throughout the crate.
pub type Int = BigInt;

/// Renders an [`Int`] as a JSON number without precision loss.
pub fn int_to_json_number(i: &Int) -> serde_json::Number {
    i.to_string()
        .parse()
        .expect("an integer literal is a valid JSON number")
}

/// Exact rational number. Always stored reduced with positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `num/den`, normalizing. Zero denominator is an error.
    pub fn new(num: Int, den: Int) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(num, den)))
    }

    pub fn from_int(n: impl Into<Int>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &Int {
        self.0.numer()
    }

    pub fn denom(&self) -> &Int {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Exact division; `Err(DivisionByZero)` when `rhs` is zero.
    pub fn div(&self, rhs: &Rational) -> Result<Rational> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    pub fn recip(&self) -> Result<Rational> {
        Rational::one().div(self)
    }

    /// The integer value, if the denominator is 1.
    pub fn to_int(&self) -> Option<Int> {
        self.is_integer().then(|| self.0.to_integer())
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<Int> for Rational {
    fn from(n: Int) -> Self {
        Rational::from_int(n)
    }
}

impl fmt::Display for Rational {
    /// `"p"` for integers, `"p/q"` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

macro_rules! delegate_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

delegate_binop!(Add, add);
delegate_binop!(Sub, sub);
delegate_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(Int::from(n), Int::from(d)).unwrap()
    }

    #[test]
    fn normalization_reduces_and_fixes_sign() {
        let x = r(2, -4);
        assert_eq!(x.numer(), &Int::from(-1));
        assert_eq!(x.denom(), &Int::from(2));
        assert_eq!(r(0, 7), Rational::zero());
        assert_eq!(r(0, 7).denom(), &Int::from(1));
    }

    #[test]
    fn arithmetic() {
        assert_eq!(r(1, 2) + r(1, 3), r(5, 6));
        assert_eq!(r(1, 2) - r(1, 3), r(1, 6));
        assert_eq!(r(2, 3) * r(3, 4), r(1, 2));
        assert_eq!(r(1, 2).div(&r(1, 4)).unwrap(), r(2, 1));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(matches!(
            r(1, 2).div(&Rational::zero()),
            Err(Error::DivisionByZero)
        ));
        assert!(matches!(
            Rational::new(Int::from(1), Int::from(0)),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn display() {
        assert_eq!(r(6, 3).to_string(), "2");
        assert_eq!(r(-3, 6).to_string(), "-1/2");
    }
}
