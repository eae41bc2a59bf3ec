//! Dense univariate polynomials with exact coefficients, lowest degree first.

use crate::exact::{binomial, Rational};
use crate::real::Real;

pub fn eval<T: Real>(coeffs: &[Rational], x: &T) -> T {
    coeffs
        .iter()
        .rev()
        .fold(T::zero(), |acc, c| acc * x.clone() + T::from_rational(c))
}

pub fn eval_f64(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

pub fn derivative(coeffs: &[Rational]) -> Vec<Rational> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * &Rational::from_integer(i as i64))
        .collect()
}

/// Antiderivative vanishing at zero.
pub fn antiderivative(coeffs: &[Rational]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(coeffs.len() + 1);
    out.push(Rational::zero());
    for (i, c) in coeffs.iter().enumerate() {
        out.push(c / &Rational::from_integer(i as i64 + 1));
    }
    out
}

/// Coefficients of `p(a + b z)` in `z`.
pub fn compose_affine(coeffs: &[Rational], a: &Rational, b: &Rational) -> Vec<Rational> {
    let n = coeffs.len();
    let mut out = vec![Rational::zero(); n];
    for (i, c) in coeffs.iter().enumerate() {
        // c (a + b z)^i
        for k in 0..=i {
            let term = c
                * &Rational::from_integer(binomial(i as u64, k as u64))
                * a.pow((i - k) as u32)
                * b.pow(k as u32);
            out[k] += &term;
        }
    }
    out
}

pub fn sub(p: &[Rational], q: &[Rational]) -> Vec<Rational> {
    let n = p.len().max(q.len());
    (0..n)
        .map(|i| {
            let a = p.get(i).cloned().unwrap_or_else(Rational::zero);
            let b = q.get(i).cloned().unwrap_or_else(Rational::zero);
            a - b
        })
        .collect()
}

/// `p ↦ ∫_{-1/2}^{1/2} p(z + s) ds`, which maps degree d to degree d.
pub fn unit_average(coeffs: &[Rational]) -> Vec<Rational> {
    let anti = antiderivative(coeffs);
    let half = Rational::frac(1, 2);
    let up = compose_affine(&anti, &half, &Rational::one());
    let down = compose_affine(&anti, &-half, &Rational::one());
    let mut out = sub(&up, &down);
    out.truncate(coeffs.len().max(1));
    out
}
