//! Centred cardinal B-splines, the averaging kernels `ω^q`, and q-average
//! sampling.
//!
//! `B_p` is supported on `[-(p+1)/2, (p+1)/2]` with unit-spaced knots and
//! equals the `(p+1)`-fold self-convolution of the indicator of
//! `[-1/2, 1/2]`, so `ω^q = B_{q-1}` for `q >= 1`. The q-average of `f` at a
//! node `c` with spacing `h` is `∫ f(c + h z) ω^q(z) dz`; `q = 0` is point
//! evaluation.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, Rational};
use crate::poly;
use crate::real::Real;

/// Gauss–Legendre nodes per unit knot interval.
pub const QUAD_NODES: usize = 12;

pub const MAX_POLY_Q: u32 = 6;
pub const MAX_POLY_DEGREE: usize = 9;

/// Piecewise-polynomial table of `B_p`. Piece `j` covers
/// `[-(p+1)/2 + j, -(p+1)/2 + j + 1)` and is stored in the local variable
/// `u ∈ [0, 1)`. Pieces are half-open, so `B_0(1/2) = 0`.
#[derive(Clone, Debug)]
pub struct BSplineBasis<T = f64> {
    p: usize,
    half_support: Rational,
    exact: Vec<Vec<Rational>>,
    pieces: Vec<Vec<T>>,
    offset: T,
}

impl<T: Real> BSplineBasis<T> {
    pub fn new(p: usize) -> Self {
        let exact = piece_table(p);
        let pieces = exact
            .iter()
            .map(|c| c.iter().map(T::from_rational).collect())
            .collect();
        let half_support = Rational::frac(p as i64 + 1, 2);
        let offset = T::from_rational(&half_support);
        BSplineBasis { p, half_support, exact, pieces, offset }
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    /// `[-(p+1)/2, (p+1)/2]`.
    pub fn support(&self) -> (Rational, Rational) {
        (-self.half_support.clone(), self.half_support.clone())
    }

    /// The `p+2` knots `-(p+1)/2, …, (p+1)/2`.
    pub fn knots(&self) -> Vec<Rational> {
        (0..=self.p as i64 + 1)
            .map(|i| Rational::from_integer(i) - &self.half_support)
            .collect()
    }

    pub fn exact_pieces(&self) -> &[Vec<Rational>] {
        &self.exact
    }

    pub fn eval(&self, x: &T) -> T {
        let s = x.clone() + self.offset.clone();
        if s < T::zero() {
            return T::zero();
        }
        let j = s.floor_i64();
        if j > self.p as i64 {
            return T::zero();
        }
        let u = s - T::from_i64(j);
        self.pieces[j as usize]
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * u.clone() + c.clone())
    }
}

/// Truncated-power form on `s = x + (p+1)/2 ∈ [0, p+1]`:
/// `B_p = (1/p!) Σ_k (-1)^k C(p+1, k) (s - k)_+^p`.
fn piece_table(p: usize) -> Vec<Vec<Rational>> {
    let inv_fact = Rational::new(1, factorial(p as u64)).expect("nonzero");
    (0..=p)
        .map(|j| {
            let mut coeffs = vec![Rational::zero(); p + 1];
            for k in 0..=j {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                let outer = Rational::from_integer(binomial(p as u64 + 1, k as u64) * sign) * &inv_fact;
                // (j - k + u)^p
                let shift = (j - k) as i64;
                for (i, c) in coeffs.iter_mut().enumerate() {
                    let b = Rational::from_integer(binomial(p as u64, i as u64))
                        * Rational::from_integer(shift).pow((p - i) as u32);
                    *c += &(&outer * &b);
                }
            }
            coeffs
        })
        .collect()
}

fn basis_cache() -> &'static Vec<BSplineBasis<f64>> {
    static CACHE: OnceLock<Vec<BSplineBasis<f64>>> = OnceLock::new();
    CACHE.get_or_init(|| (0..=12).map(BSplineBasis::new).collect())
}

/// `B_p(x)` in double precision.
pub fn bspline_eval(p: usize, x: f64) -> f64 {
    match basis_cache().get(p) {
        Some(b) => b.eval(&x),
        None => BSplineBasis::<f64>::new(p).eval(&x),
    }
}

/// Reference path: cardinal Cox–de Boor recurrence
/// `p B_p(x) = (x + (p+1)/2) B_{p-1}(x + 1/2) + ((p+1)/2 - x) B_{p-1}(x - 1/2)`.
pub fn bspline_eval_recurrence(p: usize, x: f64) -> f64 {
    if p == 0 {
        return if (-0.5..0.5).contains(&x) { 1.0 } else { 0.0 };
    }
    let half = (p as f64 + 1.0) / 2.0;
    ((x + half) * bspline_eval_recurrence(p - 1, x + 0.5) + (half - x) * bspline_eval_recurrence(p - 1, x - 0.5))
        / p as f64
}

/// `ω^q(x) = B_{q-1}(x)`. The point mass `ω^0` is not a function.
pub fn omega_eval(q: u32, x: f64) -> Result<f64> {
    if q == 0 {
        return Err(Error::InvalidArgument("omega^0 is a point mass; use q_average_sample".into()));
    }
    Ok(bspline_eval(q as usize - 1, x))
}

fn legendre() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(QUAD_NODES).expect("nonzero")))
}

/// q-average of `f` at node `n` of the grid `n h`.
pub fn q_average_sample(f: impl Fn(f64) -> f64, q: u32, h: f64, n: i64) -> Result<f64> {
    q_average_at(f, q, h, n as f64 * h)
}

/// q-average of `f` centred at `center`: `∫ f(center + h z) ω^q(z) dz`,
/// integrated piecewise between the breakpoints of `ω^q`.
pub fn q_average_at(f: impl Fn(f64) -> f64, q: u32, h: f64, center: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("spacing must be positive, got {h}")));
    }
    if q == 0 {
        let v = f(center);
        return if v.is_finite() { Ok(v) } else { Err(Error::NonFinite(center)) };
    }
    let rule = legendre();
    let kernel = BSplineBasis::<f64>::new(q as usize - 1);
    let mut bad = None;
    let mut total = 0.0;
    for i in 0..q {
        let lo = -(q as f64) / 2.0 + i as f64;
        total += rule.integrate(lo, lo + 1.0, |z| {
            let x = center + h * z;
            let v = f(x);
            if !v.is_finite() {
                bad.get_or_insert(x);
            }
            v * kernel.eval(&z)
        });
    }
    match bad {
        Some(x) => Err(Error::NonFinite(x)),
        None => Ok(total),
    }
}

/// Exact q-average of a polynomial (coefficients lowest degree first) at
/// node `n` of the grid `n h`.
pub fn q_average_polynomial(coeffs: &[Rational], q: u32, h: &Rational, n: i64) -> Result<Rational> {
    q_average_polynomial_at(coeffs, q, h, &(h * &Rational::from_integer(n)))
}

/// Exact q-average of a polynomial centred at `center`. Each factor of `ω^q`
/// is one application of the unit averaging operator.
pub fn q_average_polynomial_at(coeffs: &[Rational], q: u32, h: &Rational, center: &Rational) -> Result<Rational> {
    if q > MAX_POLY_Q {
        return Err(Error::InvalidArgument(format!("q = {q} exceeds {MAX_POLY_Q}")));
    }
    if coeffs.len() > MAX_POLY_DEGREE + 1 {
        return Err(Error::InvalidArgument(format!(
            "degree {} exceeds {MAX_POLY_DEGREE}",
            coeffs.len() - 1
        )));
    }
    let mut local = poly::compose_affine(coeffs, center, h);
    for _ in 0..q {
        local = poly::unit_average(&local);
    }
    Ok(local.first().cloned().unwrap_or_else(Rational::zero))
}
