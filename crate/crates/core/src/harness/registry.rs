//! Analytic test functions with q-average samplers and derivative bounds.
//!
//! Every function is univariate; on k-dimensional domains the harness uses
//! the tensor product `f(x_1) ⋯ f(x_k)`, whose q-averages factor the same way.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::bspline::{self, MAX_POLY_DEGREE, MAX_POLY_Q};
use crate::error::{Error, Result};
use crate::exact::{factorial, Rational};
use crate::poly;
use crate::real::Real;
use crate::wide;

#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    Sin,
    Exp,
    /// Coefficients lowest degree first.
    Poly(Vec<Rational>),
    /// `1 / (1 + 25 x²)`.
    Runge,
    /// `exp(-x²)`.
    Gauss,
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(name: &str) -> Result<Self> {
        match name {
            "sin" => Ok(TestFunction::Sin),
            "exp" => Ok(TestFunction::Exp),
            "runge" => Ok(TestFunction::Runge),
            "gauss" => Ok(TestFunction::Gauss),
            _ => {
                let list = name
                    .strip_prefix("poly:")
                    .ok_or_else(|| Error::Usage(format!("unknown test function {name:?}")))?;
                let coeffs = list
                    .split(',')
                    .map(|c| c.trim().parse::<Rational>())
                    .collect::<Result<Vec<_>>>()
                    .map_err(|_| Error::Usage(format!("bad polynomial coefficients {list:?}")))?;
                if coeffs.is_empty() {
                    return Err(Error::Usage("polynomial needs at least one coefficient".into()));
                }
                Ok(TestFunction::Poly(coeffs))
            }
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Sin => f.write_str("sin"),
            TestFunction::Exp => f.write_str("exp"),
            TestFunction::Runge => f.write_str("runge"),
            TestFunction::Gauss => f.write_str("gauss"),
            TestFunction::Poly(c) => {
                let parts: Vec<String> = c.iter().map(Rational::to_string).collect();
                write!(f, "poly:{}", parts.join(","))
            }
        }
    }
}

impl TestFunction {
    pub fn eval_f64(&self, x: f64) -> f64 {
        match self {
            TestFunction::Sin => x.sin(),
            TestFunction::Exp => x.exp(),
            TestFunction::Poly(c) => poly::eval(c, &x),
            TestFunction::Runge => 1.0 / (1.0 + 25.0 * x * x),
            TestFunction::Gauss => (-x * x).exp(),
        }
    }

    /// q-average in double precision. Closed forms where they exist,
    /// Gauss–Legendre quadrature otherwise.
    pub fn q_average_f64(&self, q: u32, h: f64, center: f64) -> Result<f64> {
        let t = h / 2.0;
        let qi = q as i32;
        match self {
            TestFunction::Sin => Ok(center.sin() * (t.sin() / t).powi(qi)),
            TestFunction::Exp => Ok(center.exp() * (t.sinh() / t).powi(qi)),
            TestFunction::Poly(c) if q <= MAX_POLY_Q && c.len() <= MAX_POLY_DEGREE + 1 => {
                let v = bspline::q_average_polynomial_at(c, q, &Rational::from_f64(h)?, &Rational::from_f64(center)?)?;
                Ok(v.to_f64())
            }
            _ => bspline::q_average_at(|x| self.eval_f64(x), q, h, center),
        }
    }

    /// Whether the exact sampler covers this function.
    pub fn has_exact_averages(&self) -> bool {
        matches!(self, TestFunction::Sin | TestFunction::Exp | TestFunction::Poly(_))
    }

    /// Point value with at least 256 correct bits.
    pub fn eval_exact(&self, x: &Rational) -> Rational {
        match self {
            TestFunction::Sin => wide::sin(x),
            TestFunction::Exp => wide::exp(x),
            TestFunction::Poly(c) => poly::eval(c, x),
            TestFunction::Runge => Rational::one() / (Rational::one() + Rational::from_integer(25) * x * x),
            TestFunction::Gauss => wide::exp(&-(x * x)),
        }
    }

    /// q-average with at least 256 correct bits (exact for polynomials).
    pub fn q_average_exact(&self, q: u32, h: &Rational, center: &Rational) -> Result<Rational> {
        let t = h / &Rational::from_integer(2);
        match self {
            TestFunction::Sin => Ok(wide::round(&(wide::sin(center) * wide::sinc(&t).pow(q)))),
            TestFunction::Exp => Ok(wide::round(&(wide::exp(center) * wide::sinhc(&t).pow(q)))),
            TestFunction::Poly(c) => bspline::q_average_polynomial_at(c, q, h, center),
            _ => Err(Error::Usage(format!("no high-precision q-average for {self}; use double precision"))),
        }
    }

    /// Upper bound on `sup |f^{(r)}|` over `[lo, hi]`.
    pub fn derivative_norm(&self, r: usize, lo: f64, hi: f64) -> f64 {
        let rf = factorial(r as u64);
        let r_fact = Rational::from_integer(rf).to_f64();
        match self {
            TestFunction::Sin => 1.0,
            TestFunction::Exp => hi.exp(),
            TestFunction::Poly(c) => {
                let m = lo.abs().max(hi.abs());
                c.iter()
                    .enumerate()
                    .skip(r)
                    .map(|(k, ck)| {
                        let falling = (k - r + 1..=k).fold(1.0, |acc, i| acc * i as f64);
                        ck.abs().to_f64() * falling * m.powi((k - r) as i32)
                    })
                    .sum()
            }
            // partial fractions: |d^r/dx^r (1 ± 5ix)^{-1}| <= r! 5^r
            TestFunction::Runge => r_fact * 5f64.powi(r as i32),
            // |H_r(x)| e^{-x²} <= 1.0865 · 2^{r/2} sqrt(r!)
            TestFunction::Gauss => 1.0865 * 2f64.powf(r as f64 / 2.0) * r_fact.sqrt(),
        }
    }
}

/// Scalars the experiment runner can sample test functions into.
pub trait Sampled: Real {
    fn point(f: &TestFunction, x: &Self) -> Result<Self>;
    fn average(f: &TestFunction, q: u32, h: &Self, center: &Self) -> Result<Self>;
    /// `c π` for a rational coefficient `c`.
    fn pi_times(c: &Rational) -> Self;
}

impl Sampled for f64 {
    fn point(f: &TestFunction, x: &f64) -> Result<f64> {
        let v = f.eval_f64(*x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(*x))
        }
    }

    fn average(f: &TestFunction, q: u32, h: &f64, center: &f64) -> Result<f64> {
        f.q_average_f64(q, *h, *center)
    }

    fn pi_times(c: &Rational) -> f64 {
        c.to_f64() * PI
    }
}

impl Sampled for Rational {
    fn point(f: &TestFunction, x: &Rational) -> Result<Rational> {
        Ok(f.eval_exact(x))
    }

    fn average(f: &TestFunction, q: u32, h: &Rational, center: &Rational) -> Result<Rational> {
        f.q_average_exact(q, h, center)
    }

    fn pi_times(c: &Rational) -> Rational {
        c * &wide::pi()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        assert_eq!("sin".parse::<TestFunction>().unwrap(), TestFunction::Sin);
        let p: TestFunction = "poly:0,0,0,1".parse().unwrap();
        assert_eq!(p.to_string(), "poly:0,0,0,1");
        assert!(matches!("cosh".parse::<TestFunction>(), Err(Error::Usage(_))));
        assert!(matches!("poly:1,x".parse::<TestFunction>(), Err(Error::Usage(_))));
    }

    #[test]
    fn derivative_norms() {
        for r in 0..10 {
            assert_eq!(TestFunction::Sin.derivative_norm(r, 0.0, 2.0 * PI), 1.0);
        }
        assert_eq!(TestFunction::Exp.derivative_norm(4, 0.0, 1.0), 1f64.exp());
        let cube: TestFunction = "poly:0,0,0,1".parse().unwrap();
        assert_eq!(cube.derivative_norm(3, -2.0, 1.0), 6.0);
        assert_eq!(cube.derivative_norm(4, -2.0, 1.0), 0.0);
        assert_eq!(cube.derivative_norm(1, -2.0, 1.0), 12.0);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for f in [TestFunction::Sin, TestFunction::Exp] {
            for q in 0..4 {
                let closed = f.q_average_f64(q, 0.3, 0.7).unwrap();
                let quad = bspline::q_average_at(|x| f.eval_f64(x), q, 0.3, 0.7).unwrap();
                assert!((closed - quad).abs() < 1e-14, "{f} q={q}");
            }
        }
    }

    #[test]
    fn exact_and_double_samplers_agree() {
        let h = Rational::frac(1, 8);
        let c = Rational::frac(3, 5);
        for f in [TestFunction::Sin, TestFunction::Exp, "poly:1,-2,0,1/3".parse().unwrap()] {
            for q in 0..3 {
                let e = f.q_average_exact(q, &h, &c).unwrap().to_f64();
                let d = f.q_average_f64(q, 0.125, 0.6).unwrap();
                assert!((e - d).abs() < 1e-14, "{f} q={q}");
            }
        }
        assert!(TestFunction::Runge.q_average_exact(1, &h, &c).is_err());
        assert_eq!(TestFunction::Runge.eval_exact(&Rational::frac(1, 5)), Rational::frac(1, 2));
    }
}
