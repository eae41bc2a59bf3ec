//! Transcendental functions of exact rationals at 256-bit precision.
//!
//! Used to generate sample data for the exact-arithmetic path. Results are
//! rounded to nearest and returned as exact dyadic [`Rational`]s.

use std::cell::RefCell;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::exact::Rational;

/// Working precision in bits.
pub const PRECISION: usize = 256;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

fn int_to_big(n: &BigInt) -> BigFloat {
    let bits = (n.bits() as usize).max(64);
    let p = bits.div_ceil(64) * 64 + 64;
    with_consts(|cc| BigFloat::parse(&format!("{n:x}"), Radix::Hex, p, RM, cc))
}

fn to_big(x: &Rational) -> BigFloat {
    let num = int_to_big(x.numer());
    if x.denom().is_one() {
        return num;
    }
    let den = int_to_big(x.denom());
    num.div(&den, PRECISION, RM)
}

fn from_big(x: &BigFloat) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    let (words, _, sign, exponent, _) = x.as_raw_parts().expect("finite value");
    let mut mantissa = BigUint::zero();
    for w in words.iter().rev() {
        mantissa = (mantissa << 64) | BigUint::from(*w);
    }
    let mut m = BigInt::from(mantissa);
    if sign == Sign::Neg {
        m = -m;
    }
    let shift = exponent as i64 - 64 * words.len() as i64;
    let two = Rational::from_integer(2);
    let scale = if shift >= 0 {
        two.pow(shift as u32)
    } else {
        Rational::one() / two.pow((-shift) as u32)
    };
    Rational::from_integer(m) * scale
}

pub fn sin(x: &Rational) -> Rational {
    let arg = to_big(x);
    let v = with_consts(|cc| arg.sin(PRECISION, RM, cc));
    from_big(&v)
}

pub fn cos(x: &Rational) -> Rational {
    let arg = to_big(x);
    let v = with_consts(|cc| arg.cos(PRECISION, RM, cc));
    from_big(&v)
}

pub fn exp(x: &Rational) -> Rational {
    let arg = to_big(x);
    let v = with_consts(|cc| arg.exp(PRECISION, RM, cc));
    from_big(&v)
}

pub fn pi() -> Rational {
    let v = with_consts(|cc| cc.pi(PRECISION, RM));
    from_big(&v)
}

/// Nearest value with a `PRECISION`-bit mantissa.
pub fn round(x: &Rational) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    from_big(&to_big(x))
}

/// `sin(t)/t`, with the removable singularity at zero.
pub fn sinc(t: &Rational) -> Rational {
    if t.is_zero() {
        return Rational::one();
    }
    let arg = to_big(t);
    let v = with_consts(|cc| arg.sin(PRECISION, RM, cc));
    from_big(&v.div(&arg, PRECISION, RM))
}

/// `sinh(t)/t`, with the removable singularity at zero.
pub fn sinhc(t: &Rational) -> Rational {
    if t.is_zero() {
        return Rational::one();
    }
    let arg = to_big(t);
    let v = with_consts(|cc| arg.sinh(PRECISION, RM, cc));
    from_big(&v.div(&arg, PRECISION, RM))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Rational, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    #[test]
    fn matches_double_precision() {
        for x in [0.1, 1.0, 2.5, -3.0, 6.0] {
            let r = Rational::from_f64(x).unwrap();
            assert!(close(&sin(&r), x.sin(), 1e-15));
            assert!(close(&cos(&r), x.cos(), 1e-15));
            assert!(close(&exp(&r), x.exp(), 1e-15 * x.exp()));
        }
        assert_eq!(pi().to_f64(), std::f64::consts::PI);
    }

    #[test]
    fn identities_hold_far_beyond_double() {
        let x = Rational::frac(1, 3);
        let s = sin(&x);
        let c = cos(&x);
        let one = &s * &s + &c * &c - Rational::one();
        assert!(one.abs().to_f64() < 1e-70);
        let e = exp(&x) * exp(&-x) - Rational::one();
        assert!(e.abs().to_f64() < 1e-70);
        // sin(1/3) to 35 digits
        let reference: Rational = "0.32719469679615224417334408526762060".parse().unwrap();
        assert!((s - reference).abs().to_f64() < 1e-35);
    }

    #[test]
    fn exact_dyadic_roundtrip() {
        assert_eq!(from_big(&to_big(&Rational::frac(-3, 8))), Rational::frac(-3, 8));
        assert_eq!(from_big(&to_big(&Rational::from_integer(12345))), Rational::from_integer(12345));
        assert_eq!(sinc(&Rational::zero()), Rational::one());
        assert_eq!(sinhc(&Rational::zero()), Rational::one());
        assert_eq!(round(&Rational::frac(5, 4)), Rational::frac(5, 4));
        let third = round(&Rational::frac(1, 3));
        assert!(third.denom().bits() <= PRECISION as u64 + 2);
        assert!((third - Rational::frac(1, 3)).abs().to_f64() < 1e-76);
        let t = Rational::frac(1, 64);
        assert!((sinhc(&t).to_f64() - (1.0f64 / 64.0).sinh() * 64.0).abs() < 1e-16);
        assert!((sinc(&t).to_f64() - (1.0f64 / 64.0).sin() * 64.0).abs() < 1e-16);
    }
}
