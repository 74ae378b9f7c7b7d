//! Exact numbers.
//!
//! Every probability and conditional expectation in this crate is exact.
//! 2-cut quantities live in [`Dyadic`] (denominator a power of two); anything
//! touching three or more parts uses [`Rational`], an arbitrary-precision
//! fraction. Floats appear only at the reporting boundary.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// `num / den` as a [`Rational`].
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// A rational number whose denominator is a power of two.
///
/// Stored canonically: the numerator is odd, or the value is zero with
/// exponent zero. Equality is therefore structural.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Dyadic {
    num: BigInt,
    log2_den: u32,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic::default()
    }

    pub fn one() -> Self {
        Dyadic::from_int(1)
    }

    pub fn from_int(value: i64) -> Self {
        Dyadic { num: BigInt::from(value), log2_den: 0 }
    }

    /// `num / 2^log2_den`, canonicalized.
    pub fn new(num: impl Into<BigInt>, log2_den: u32) -> Self {
        let mut d = Dyadic { num: num.into(), log2_den };
        d.normalize();
        d
    }

    /// `2^exp` for a possibly negative exponent.
    pub fn pow2(exp: i32) -> Self {
        if exp >= 0 {
            Dyadic { num: BigInt::one() << exp as usize, log2_den: 0 }
        } else {
            Dyadic { num: BigInt::one(), log2_den: exp.unsigned_abs() }
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn log2_denominator(&self) -> u32 {
        self.log2_den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn abs(&self) -> Self {
        Dyadic { num: self.num.abs(), log2_den: self.log2_den }
    }

    pub fn half(&self) -> Self {
        Dyadic::new(self.num.clone(), self.log2_den + 1)
    }

    /// True when the value is an integer multiple of `2^-exp`.
    pub fn is_multiple_of_pow2_inv(&self, exp: u32) -> bool {
        self.log2_den <= exp
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.num.clone(), BigInt::one() << self.log2_den as usize)
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.to_rational())
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.log2_den = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0).min(self.log2_den as u64) as u32;
        if tz > 0 {
            self.num >>= tz as usize;
            self.log2_den -= tz;
        }
    }

    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, u32) {
        let den = self.log2_den.max(other.log2_den);
        let a = &self.num << (den - self.log2_den) as usize;
        let b = &other.num << (den - other.log2_den) as usize;
        (a, b, den)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2_den == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.log2_den)
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, den) = self.aligned(rhs);
        Dyadic::new(a + b, den)
    }
}

impl Sub<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, den) = self.aligned(rhs);
        Dyadic::new(a - b, den)
    }
}

impl Mul<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.log2_den + rhs.log2_den)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: Dyadic) -> Dyadic {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: &Dyadic) -> Dyadic {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&Dyadic> for Dyadic {
    fn add_assign(&mut self, rhs: &Dyadic) {
        *self = &*self + rhs;
    }
}

impl AddAssign for Dyadic {
    fn add_assign(&mut self, rhs: Dyadic) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&Dyadic> for Dyadic {
    fn sub_assign(&mut self, rhs: &Dyadic) {
        *self = &*self - rhs;
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -self.num, log2_den: self.log2_den }
    }
}

impl Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Dyadic> for Dyadic {
    fn sum<I: Iterator<Item = &'a Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| acc + x)
    }
}

impl From<Dyadic> for Rational {
    fn from(d: Dyadic) -> Rational {
        d.to_rational()
    }
}

impl TryFrom<&Rational> for Dyadic {
    type Error = ();

    /// Succeeds when the reduced denominator is a power of two.
    fn try_from(value: &Rational) -> Result<Self, ()> {
        let den = value.denom();
        let tz = den.trailing_zeros().unwrap_or(0);
        if (den >> tz as usize).is_one() {
            Ok(Dyadic::new(value.numer().clone(), tz as u32))
        } else {
            Err(())
        }
    }
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Exact `(a/b)^e`.
pub fn pow_ratio(a: u64, b: u64, e: u32) -> Rational {
    let num = num_traits::pow(BigInt::from(a), e as usize);
    let den = num_traits::pow(BigInt::from(b), e as usize);
    Rational::new(num, den)
}

/// Integer square root, `None` unless `value` is a perfect square.
pub fn exact_sqrt(value: &BigInt) -> Option<BigInt> {
    if value.is_negative() {
        return None;
    }
    let root = value.sqrt();
    (&root * &root == *value).then_some(root)
}

#[allow(dead_code)]
pub(crate) fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_form() {
        let d = Dyadic::new(12, 4);
        assert_eq!(d.numerator(), &BigInt::from(3));
        assert_eq!(d.log2_denominator(), 2);
        assert_eq!(Dyadic::new(0, 9), Dyadic::zero());
        assert_eq!(Dyadic::new(-8, 3), Dyadic::from_int(-1));
    }

    #[test]
    fn pow2_and_half() {
        assert_eq!(Dyadic::pow2(-3), Dyadic::new(1, 3));
        assert_eq!(Dyadic::pow2(2), Dyadic::from_int(4));
        assert_eq!(Dyadic::from_int(3).half(), Dyadic::new(3, 1));
    }

    #[test]
    fn rational_round_trip() {
        let r = ratio(-7, 16);
        let d = Dyadic::try_from(&r).unwrap();
        assert_eq!(d.to_rational(), r);
        assert!(Dyadic::try_from(&ratio(1, 3)).is_err());
    }

    #[test]
    fn binomials_and_roots() {
        assert_eq!(binomial(9, 3), BigInt::from(84));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(exact_sqrt(&BigInt::from(169)), Some(BigInt::from(13)));
        assert_eq!(exact_sqrt(&BigInt::from(170)), None);
    }

    fn dyadic() -> impl Strategy<Value = Dyadic> {
        (-1000i64..1000, 0u32..12).prop_map(|(n, e)| Dyadic::new(n, e))
    }

    proptest! {
        #[test]
        fn arithmetic_matches_rationals(a in dyadic(), b in dyadic()) {
            prop_assert_eq!((&a + &b).to_rational(), a.to_rational() + b.to_rational());
            prop_assert_eq!((&a - &b).to_rational(), a.to_rational() - b.to_rational());
            prop_assert_eq!((&a * &b).to_rational(), a.to_rational() * b.to_rational());
            prop_assert_eq!(a.cmp(&b), a.to_rational().cmp(&b.to_rational()));
        }
    }
}
