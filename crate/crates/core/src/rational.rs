//! Exact rational numbers used for priors, utilities and objective values.

use core::fmt;
use core::iter::Sum;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_rational::Ratio;
use num_traits::Zero;

/// A rational number kept in lowest terms with a positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<i128>);

impl Rational {
    /// Zero.
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    /// One.
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    /// Builds `numer / denom`, reducing to lowest terms. `None` if `denom == 0`.
    pub fn new(numer: i128, denom: i128) -> Option<Self> {
        if denom == 0 {
            None
        } else {
            Some(Self(Ratio::new(numer, denom)))
        }
    }

    /// The integer `value`.
    pub fn from_integer(value: i128) -> Self {
        Self(Ratio::from_integer(value))
    }

    /// Numerator in lowest terms.
    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    /// Denominator in lowest terms, always positive.
    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    /// True for zero.
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// True for values strictly below zero.
    pub fn is_negative(&self) -> bool {
        self.numer() < 0
    }

    /// Nearest `f64`; only used for display and roots.
    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// `self` raised to a non-negative integer power. `None` on overflow.
    pub fn checked_pow(&self, exp: u32) -> Option<Self> {
        let numer = self.numer().checked_pow(exp)?;
        let denom = self.denom().checked_pow(exp)?;
        Some(Self(Ratio::new_raw(numer, denom)))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Self::from_integer(value as i128)
    }
}

impl From<usize> for Rational {
    fn from(value: usize) -> Self {
        Self::from_integer(value as i128)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        Rational(self.0 / rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |acc, x| acc + *x)
    }
}

/// Renders as `p/q`, or `p` when the denominator is one.
impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

/// Error from parsing a [`Rational`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal (expected `p/q` or an integer)")]
pub struct ParseRationalError;

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p/q` or a bare integer, with optional surrounding whitespace.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (numer, denom) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let numer: i128 = numer.parse().map_err(|_| ParseRationalError)?;
        let denom: i128 = denom.parse().map_err(|_| ParseRationalError)?;
        Rational::new(numer, denom).ok_or(ParseRationalError)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn lowest_terms_and_sign() {
        let r = Rational::new(4, -6).unwrap();
        assert_eq!(r.numer(), -2);
        assert_eq!(r.denom(), 3);
        assert!(Rational::new(1, 0).is_none());
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(Rational::new(4, 3).unwrap().to_string(), "4/3");
        assert_eq!(Rational::from_integer(-2).to_string(), "-2");
        assert_eq!(
            "2/6".parse::<Rational>().unwrap(),
            Rational::new(1, 3).unwrap()
        );
        assert_eq!(
            " 7 ".parse::<Rational>().unwrap(),
            Rational::from_integer(7)
        );
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn exact_ordering() {
        let third = Rational::new(1, 3).unwrap();
        assert!(third + third + third == Rational::ONE);
        assert!(Rational::new(2, 3).unwrap() > Rational::new(665, 1000).unwrap());
    }
}
