//! Exact rational scalars.
//!
//! Values that fit in machine words are kept in a small representation and
//! promoted to arbitrary precision on overflow. The representation is
//! canonical (a value is small whenever it can be), so structural equality
//! and hashing agree with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::AlgebraError;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    // den > 0, gcd(|num|, den) = 1, num != i64::MIN
    Small(i64, i64),
    // never representable as Small
    Big(Ratio<BigInt>),
}

/// An exact rational number in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BigRational(Repr);

fn fits(v: i128) -> Option<i64> {
    if v > i64::MIN as i128 && v <= i64::MAX as i128 {
        Some(v as i64)
    } else {
        None
    }
}

impl BigRational {
    pub fn zero() -> Self {
        BigRational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        BigRational(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Self {
        if n == i64::MIN {
            return Self::from_big(Ratio::from_integer(BigInt::from(n)));
        }
        BigRational(Repr::Small(n, 1))
    }

    /// Builds `num/den`, normalizing sign and common factors.
    pub fn new(num: i64, den: i64) -> Result<Self, AlgebraError> {
        if den == 0 {
            return Err(AlgebraError::ZeroDenominator);
        }
        Ok(Self::from_i128(num as i128, den as i128))
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        Ok(Self::from_big(Ratio::new(num, den)))
    }

    fn from_i128(mut n: i128, mut d: i128) -> Self {
        debug_assert!(d != 0);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = n.gcd(&d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        match (fits(n), fits(d)) {
            (Some(n), Some(d)) => BigRational(Repr::Small(n, d)),
            _ => BigRational(Repr::Big(Ratio::new_raw(BigInt::from(n), BigInt::from(d)))),
        }
    }

    // `r` must already be reduced with positive denominator.
    fn from_big(r: Ratio<BigInt>) -> Self {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN {
                return BigRational(Repr::Small(n, d));
            }
        }
        BigRational(Repr::Big(r))
    }

    fn to_big(&self) -> Ratio<BigInt> {
        match &self.0 {
            Repr::Small(n, d) => Ratio::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    /// The value as an integer, borrowed when already big.
    fn as_int(&self) -> Option<std::borrow::Cow<'_, BigInt>> {
        match &self.0 {
            Repr::Small(n, 1) => Some(std::borrow::Cow::Owned(BigInt::from(*n))),
            Repr::Big(r) if r.is_integer() => Some(std::borrow::Cow::Borrowed(r.numer())),
            _ => None,
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n > 0,
            Repr::Big(r) => r.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(r) => r.is_negative(),
        }
    }

    /// The value as an `i64` if it is an integer in range.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n, 1) => Some(*n),
            _ => None,
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse.
    pub fn recip(&self) -> Result<Self, AlgebraError> {
        match &self.0 {
            Repr::Small(0, _) => Err(AlgebraError::DivisionByZero),
            Repr::Small(n, d) => Ok(Self::from_i128(*d as i128, *n as i128)),
            Repr::Big(r) => Ok(Self::from_big(r.recip())),
        }
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        Ok(self * &rhs.recip()?)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i32) -> Result<Self, AlgebraError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut out = Self::one();
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(out)
    }

    /// True if the stored form is the reduced canonical one. Always holds for
    /// values produced by this module; exposed for invariant checks.
    pub fn is_normalized(&self) -> bool {
        match &self.0 {
            Repr::Small(n, d) => *d > 0 && *n != i64::MIN && n.gcd(d) == 1,
            Repr::Big(r) => {
                r.denom().is_positive()
                    && r.numer().gcd(r.denom()).is_one()
                    && !(r.numer().to_i64().is_some_and(|n| n != i64::MIN) && r.denom().to_i64().is_some())
            }
        }
    }
}

impl Default for BigRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for BigRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<i32> for BigRational {
    fn from(n: i32) -> Self {
        Self::from_int(n as i64)
    }
}

impl From<BigInt> for BigRational {
    fn from(n: BigInt) -> Self {
        Self::from_big(Ratio::from_integer(n))
    }
}

impl<'a> Add<&'a BigRational> for &'a BigRational {
    type Output = BigRational;
    fn add(self, rhs: &BigRational) -> BigRational {
        match (&self.0, &rhs.0) {
            (Repr::Small(0, _), _) => rhs.clone(),
            (_, Repr::Small(0, _)) => self.clone(),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if b == d {
                    return BigRational::from_i128(*a as i128 + *c as i128, *b as i128);
                }
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                match (a * d).checked_add(c * b) {
                    Some(n) => BigRational::from_i128(n, b * d),
                    None => BigRational::from_big(self.to_big() + rhs.to_big()),
                }
            }
            _ => match (self.as_int(), rhs.as_int()) {
                (Some(a), Some(b)) => BigRational::from_big(Ratio::from_integer(&*a + &*b)),
                _ => BigRational::from_big(self.to_big() + rhs.to_big()),
            },
        }
    }
}

impl<'a> Sub<&'a BigRational> for &'a BigRational {
    type Output = BigRational;
    fn sub(self, rhs: &BigRational) -> BigRational {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a BigRational> for &'a BigRational {
    type Output = BigRational;
    fn mul(self, rhs: &BigRational) -> BigRational {
        match (&self.0, &rhs.0) {
            (Repr::Small(0, _), _) | (_, Repr::Small(0, _)) => BigRational::zero(),
            (Repr::Small(1, 1), _) => rhs.clone(),
            (_, Repr::Small(1, 1)) => self.clone(),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                BigRational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            (Repr::Small(-1, 1), _) => -rhs,
            (_, Repr::Small(-1, 1)) => -self,
            _ => match (self.as_int(), rhs.as_int()) {
                (Some(a), Some(b)) => BigRational::from_big(Ratio::from_integer(&*a * &*b)),
                _ => BigRational::from_big(self.to_big() * rhs.to_big()),
            },
        }
    }
}

impl<'a> Div<&'a BigRational> for &'a BigRational {
    type Output = BigRational;
    /// Panics on division by zero; use [`BigRational::checked_div`] otherwise.
    fn div(self, rhs: &BigRational) -> BigRational {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Neg for &BigRational {
    type Output = BigRational;
    fn neg(self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational(Repr::Small(-n, *d)),
            Repr::Big(r) => BigRational::from_big(-r.clone()),
        }
    }
}

impl Neg for BigRational {
    type Output = BigRational;
    fn neg(self) -> BigRational {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<BigRational> for BigRational {
            type Output = BigRational;
            fn $m(self, rhs: BigRational) -> BigRational {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl Ord for BigRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for BigRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BigRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for BigRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for BigRational {
    type Err = AlgebraError;

    /// Parses `"p"` or `"p/q"`. Input must be canonical: lowest terms,
    /// positive denominator, no `/1`, sign only on the numerator.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AlgebraError::Parse(s.to_string());
        let int = |t: &str| -> Result<BigInt, AlgebraError> {
            let digits = t.strip_prefix('-').unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            if digits.len() > 1 && digits.starts_with('0') {
                return Err(bad());
            }
            if t.starts_with('-') && digits == "0" {
                return Err(bad());
            }
            t.parse::<BigInt>().map_err(|_| bad())
        };
        let r = match s.split_once('/') {
            None => BigRational::from(int(s)?),
            Some((n, d)) => {
                if d.starts_with('-') {
                    return Err(bad());
                }
                let (n, d) = (int(n)?, int(d)?);
                if d.is_zero() || d.is_one() || !n.gcd(&d).is_one() {
                    return Err(bad());
                }
                BigRational::from_big(Ratio::new_raw(n, d))
            }
        };
        Ok(r)
    }
}

impl Serialize for BigRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BigRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n, d).unwrap()
    }

    #[test]
    fn normalizes_sign_and_gcd() {
        assert_eq!(q(2, -4), q(-1, 2));
        assert_eq!(q(0, -7), BigRational::zero());
        assert_eq!(q(6, 3).to_string(), "2");
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = BigRational::from_int(i64::MAX);
        let sq = &big * &big;
        assert!(sq.is_normalized());
        let back = &sq / &big;
        assert_eq!(back, big);
        assert!(matches!(back.0, Repr::Small(..)));
    }

    #[test]
    fn i64_min_is_big() {
        let m = BigRational::from_int(i64::MIN);
        assert!(m.is_normalized());
        assert_eq!(m.to_string(), i64::MIN.to_string());
        assert_eq!(&m + &BigRational::one(), BigRational::from_int(i64::MIN + 1));
    }

    #[test]
    fn parse_canonical_only() {
        assert_eq!("3/4".parse::<BigRational>().unwrap(), q(3, 4));
        assert_eq!("-3".parse::<BigRational>().unwrap(), q(-3, 1));
        for bad in ["2/4", "3/-4", "1/1", "-0", "01", "", "a", "1/0", "+1"] {
            assert!(bad.parse::<BigRational>().is_err(), "{bad}");
        }
    }

    #[test]
    fn pow_and_recip() {
        assert_eq!(q(2, 3).pow(-2).unwrap(), q(9, 4));
        assert!(BigRational::zero().recip().is_err());
        assert_eq!(BigRational::from_int(2).pow(70).unwrap().to_string(), "1180591620717411303424");
    }
}
