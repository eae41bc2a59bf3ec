//! Exact rational arithmetic over arbitrary-precision integers.
//!
//! Every coefficient table in the crate is generated with [`Rational`] and
//! only converted to floating point at the point of use, so generated tables
//! compare structurally against published values.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A reduced fraction `numerator / denominator` with a positive denominator.
///
/// Zero is `0/1`. The wrapped `BigRational` normalises after every
/// operation, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numerator: impl Into<BigInt>, denominator: impl Into<BigInt>) -> Result<Self> {
        let den = denominator.into();
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numerator.into(), den)))
    }

    /// Shorthand for small literals; panics on a zero denominator.
    pub fn frac(numerator: i64, denominator: i64) -> Self {
        Self::new(numerator, denominator).expect("nonzero denominator")
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
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

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn pow(&self, exp: u32) -> Self {
        Rational(num_traits::pow(self.0.clone(), exp as usize))
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    /// Nearest double.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact value of a finite double.
    pub fn from_f64(x: f64) -> Result<Self> {
        BigRational::from_float(x)
            .map(Rational)
            .ok_or_else(|| Error::InvalidArgument(format!("non-finite value {x}")))
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `"n"`, `"n/d"` and plain decimals such as `"-0.125"` (read exactly).
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("cannot parse rational {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            return Rational::new(n, d);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let int_digits = int.trim_start_matches(['-', '+']);
            let digits = format!("{int_digits}{frac}");
            let mut n: BigInt = digits.parse().map_err(|_| bad())?;
            if negative {
                n = -n;
            }
            let d = num_traits::pow(BigInt::from(10), frac.len());
            return Rational::new(n, d);
        }
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rational::from_integer(n))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

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

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

pub fn rat_add(x: &Rational, y: &Rational) -> Rational {
    x + y
}

pub fn rat_sub(x: &Rational, y: &Rational) -> Rational {
    x - y
}

pub fn rat_mul(x: &Rational, y: &Rational) -> Rational {
    x * y
}

pub fn rat_div(x: &Rational, y: &Rational) -> Result<Rational> {
    x.checked_div(y)
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
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

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Exact comparison by cross-multiplication.
pub fn compare(x: &Rational, y: &Rational) -> Ordering {
    (x.numer() * y.denom()).cmp(&(y.numer() * x.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn small_arithmetic() {
        assert_eq!(r(1, 3) + r(1, 6), r(1, 2));
        let z = r(1, 8) * Rational::zero();
        assert_eq!(z, Rational::zero());
        assert_eq!(z.denom(), &BigInt::one());
        // -1/24 - (1/8)(-1/24) = -1/24 + 1/192
        assert_eq!(r(-1, 24) - r(1, 8) * r(-1, 24), r(-7, 192));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(matches!(rat_div(&r(1, 2), &Rational::zero()), Err(Error::DivisionByZero)));
        assert!(Rational::new(1, 0).is_err());
        assert_eq!(rat_div(&r(1, 2), &r(3, 4)).unwrap(), r(2, 3));
    }

    #[test]
    fn stored_reduced_with_positive_denominator() {
        let x = Rational::new(6, -9).unwrap();
        assert_eq!(x.numer(), &BigInt::from(-2));
        assert_eq!(x.denom(), &BigInt::from(3));
        assert_eq!(Rational::new(0, -5).unwrap().to_string(), "0");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(6, 3), BigInt::from(20));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(binomial(0, 0), BigInt::one());
    }

    #[test]
    fn float_conversion() {
        assert_eq!(r(1, 2).to_f64(), 0.5);
        assert_eq!(r(-1, 24).to_f64(), -0.041666666666666664);
        assert_eq!(r(319, 192).to_f64(), 1.6614583333333333);
        let big = Rational::new(BigInt::from(1), BigInt::from(40874803200u64)).unwrap();
        assert_eq!(big.to_f64(), 1.0 / 40874803200.0);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("-63/2883584".parse::<Rational>().unwrap(), r(-63, 2883584));
        assert_eq!("-0.125".parse::<Rational>().unwrap(), r(-1, 8));
        assert_eq!("7".parse::<Rational>().unwrap(), r(7, 1));
        assert_eq!(r(-63, 2883584).to_string(), "-63/2883584");
        assert_eq!(r(4, 4).to_string(), "1");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
    }

    #[test]
    fn from_f64_is_exact() {
        assert_eq!(Rational::from_f64(0.375).unwrap(), r(3, 8));
        assert!(Rational::from_f64(f64::NAN).is_err());
        let x = Rational::from_f64(0.1).unwrap();
        assert_eq!(x.to_f64(), 0.1);
        assert_ne!(x, r(1, 10));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rational() -> impl Strategy<Value = Rational> {
            (-10_000i64..10_000, 1i64..10_000).prop_map(|(n, d)| Rational::frac(n, d))
        }

        proptest! {
            #[test]
            fn add_sub_roundtrip(x in rational(), y in rational()) {
                prop_assert_eq!(&(&x + &y) - &y, x);
            }

            #[test]
            fn commutative_and_associative(x in rational(), y in rational(), z in rational()) {
                prop_assert_eq!(&x + &y, &y + &x);
                prop_assert_eq!(&x * &y, &y * &x);
                prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
                prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            }

            #[test]
            fn reduction_idempotent(x in rational()) {
                let again = Rational::new(x.numer().clone(), x.denom().clone()).unwrap();
                prop_assert_eq!(again.numer(), x.numer());
                prop_assert_eq!(again.denom(), x.denom());
            }

            #[test]
            fn compare_matches_float_order(x in rational(), y in rational()) {
                prop_assert_eq!(compare(&x, &y), x.cmp(&y));
            }

            #[test]
            fn binomial_symmetry(n in 0u64..60, k in 0u64..60) {
                prop_assume!(k <= n);
                prop_assert_eq!(binomial(n, k), binomial(n, n - k));
            }
        }
    }
}
