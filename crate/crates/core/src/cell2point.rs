//! Point values from cell averages.
//!
//! For a half-width `m`, the point value at a cell centre is recovered as
//! `f(a) ≈ Σ_{r=0..m} a_r Δ^{2r} f̄(a)` where `Δ^{2r}` is the centred even
//! difference and the weights `a_r` solve a unit lower-triangular system whose
//! entries are the Taylor coefficients of the differences of cell averages.
//! The truncation error is `|a_{m+1}| ‖f^{(2m+2)}‖ h^{2m+2}`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;

use crate::boundary;
use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, Rational};
use crate::grid::{self, GridField};
use crate::real::Real;

/// Reconstruction weights `a_0..a_m` (with `a_0 = 1`) and the error
/// coefficient `a_{m+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReconCoefficients {
    m: usize,
    a: Vec<Rational>,
    err_coeff: Rational,
}

impl ReconCoefficients {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn a(&self) -> &[Rational] {
        &self.a
    }

    pub fn err_coeff(&self) -> &Rational {
        &self.err_coeff
    }

    /// Expanded point stencil of length `2m+1`:
    /// `w_j = Σ_r a_r (-1)^{r+j} C(2r, r+j)`.
    pub fn stencil(&self) -> Vec<Rational> {
        let m = self.m as i64;
        (-m..=m)
            .map(|j| {
                self.a
                    .iter()
                    .enumerate()
                    .filter(|(r, _)| j.unsigned_abs() <= *r as u64)
                    .map(|(r, ar)| {
                        let r = r as i64;
                        let c = Rational::from_integer(binomial(2 * r as u64, (r + j) as u64));
                        let signed = if (r + j) % 2 == 0 { c } else { -c };
                        ar * &signed
                    })
                    .sum()
            })
            .collect()
    }

    pub fn stencil_as<T: Real>(&self) -> Vec<T> {
        self.stencil().iter().map(T::from_rational).collect()
    }
}

/// Coefficient of `h^{2i} f^{(2i)}` in the expansion of `Δ^{2j} f̄`.
pub fn matrix_entry(i: usize, j: usize) -> Rational {
    assert!(i >= 1 && j >= 1, "matrix indices start at 1");
    if i < j {
        return Rational::zero();
    }
    let jj = j as u64;
    let mut total = Rational::zero();
    for t in 0..=(i - j) as u64 {
        let power = 2 * (i as u64 - t);
        let inner: BigInt = (jj + 1..=2 * jj)
            .map(|s| {
                let term = binomial(2 * jj, s) * num_traits::pow(BigInt::from(s - jj), power as usize);
                if s % 2 == 0 {
                    term
                } else {
                    -term
                }
            })
            .sum();
        // 1 / (2^{2t-1} (2t+1)! (2(i-t))!)
        let den = num_traits::pow(BigInt::from(2), 2 * t as usize) * factorial(2 * t + 1) * factorial(power);
        total += &Rational::new(BigInt::from(2) * inner, den).expect("positive denominator");
    }
    total
}

/// `b_i = -1 / ((2i+1)! 4^i)`, the coefficient of `h^{2i} f^{(2i)}` in `f̄ - f`
/// with the sign flipped.
pub fn rhs_entry(i: usize) -> Rational {
    assert!(i >= 1, "rhs index starts at 1");
    let den = factorial(2 * i as u64 + 1) * num_traits::pow(BigInt::from(4), i);
    Rational::new(-1, den).expect("positive denominator")
}

/// Forward substitution on the unit lower-triangular system, continued one
/// step to obtain the error coefficient.
pub fn solve_coefficients(m: usize) -> ReconCoefficients {
    let mut a = vec![Rational::one()];
    for k in 1..=m + 1 {
        let mut ak = rhs_entry(k);
        for (r, ar) in a.iter().enumerate().skip(1) {
            ak -= &(matrix_entry(k, r) * ar);
        }
        a.push(ak);
    }
    let err_coeff = a.pop().expect("m+2 entries");
    ReconCoefficients { m, a, err_coeff }
}

/// `Δ^{2r} g(c) = Σ_{j=-r..r} (-1)^{r+j} C(2r, j+r) g(c+j)`.
pub fn central_difference<T: Real>(data: &[T], c: usize, r: usize) -> Result<T> {
    if r > c || c + r >= data.len() {
        let bad = if r > c { c as i64 - r as i64 } else { (c + r) as i64 };
        return Err(Error::IndexOutOfRange { index: bad, len: data.len() });
    }
    let mut acc = T::zero();
    for (offset, value) in data[c - r..=c + r].iter().enumerate() {
        let w = T::from_rational(&Rational::from_integer(binomial(2 * r as u64, offset as u64)));
        let w = if offset % 2 == 0 { w } else { -w };
        acc = acc + w * value.clone();
    }
    Ok(acc)
}

/// Point value at the centre of a window of `2m+1` cell averages.
pub fn reconstruct_point_1d<T: Real>(window: &[T], coeffs: &ReconCoefficients) -> Result<T> {
    let expected = 2 * coeffs.m + 1;
    if window.len() != expected {
        return Err(Error::WindowLength { expected, got: window.len() });
    }
    let weights = coeffs.stencil_as::<T>();
    Ok(crate::real::dot(&weights, window))
}

/// Applies the tensor-product reconstruction by successive axis passes
/// without any boundary treatment: each axis loses `m` samples per side.
pub fn reconstruct_grid_valid<T: Real>(
    field: &GridField<T>,
    coeffs: &[ReconCoefficients],
) -> Result<GridField<T>> {
    check_recon_input(field, coeffs)?;
    let mut out = field.clone();
    for (axis, c) in coeffs.iter().enumerate() {
        if c.m == 0 {
            continue;
        }
        out = out.convolve_axis(axis, &c.stencil_as::<T>()).map_err(|e| margin_error(e, c.m))?;
    }
    Ok(out.with_q(0))
}

/// Tensor-product reconstruction on the full input grid. Each axis is first
/// extended by `m` ghost samples per side using extrapolation of degree
/// `2m+1`, so the output has the geometry of the input.
pub fn reconstruct_grid_kd<T: Real>(
    field: &GridField<T>,
    coeffs: &[ReconCoefficients],
) -> Result<GridField<T>> {
    check_recon_input(field, coeffs)?;
    let mut extended = field.clone();
    for (axis, c) in coeffs.iter().enumerate() {
        if c.m == 0 {
            continue;
        }
        extended = boundary::extend_axis(&extended, axis, c.m, 2 * c.m + 1)?;
    }
    reconstruct_grid_valid(&extended, coeffs)
}

fn check_recon_input<T: Real>(field: &GridField<T>, coeffs: &[ReconCoefficients]) -> Result<()> {
    if field.q() != 1 {
        return Err(Error::QMismatch { field: field.q(), expected: 1 });
    }
    if coeffs.len() != field.k() {
        return Err(Error::InvalidArgument(format!(
            "{} coefficient sets for a {}-dimensional field",
            coeffs.len(),
            field.k()
        )));
    }
    Ok(())
}

fn margin_error(e: Error, m: usize) -> Error {
    match e {
        Error::InsufficientSamples { axis, available, required, .. } => {
            Error::InsufficientSamples { axis, available, required, margin: m }
        }
        other => other,
    }
}

/// Expanded k-dimensional point stencil (row-major) for the given axes.
pub fn tensor_stencil(coeffs: &[ReconCoefficients]) -> (Vec<usize>, Vec<Rational>) {
    let per_axis: Vec<Vec<Rational>> = coeffs.iter().map(ReconCoefficients::stencil).collect();
    grid::expand_tensor(&per_axis)
}

/// Weights `a_{i_1} ⋯ a_{i_k}` of the mixed differences
/// `Δ^{2i_1,x_1} ⋯ Δ^{2i_k,x_k} f̄`, keyed by `(i_1, …, i_k)`.
pub fn tensor_operator_coefficients(coeffs: &[ReconCoefficients]) -> BTreeMap<Vec<usize>, Rational> {
    let shape: Vec<usize> = coeffs.iter().map(|c| c.m + 1).collect();
    let total: usize = shape.iter().product();
    let mut idx = vec![0usize; shape.len()];
    let mut out = BTreeMap::new();
    for _ in 0..total {
        let w = idx
            .iter()
            .zip(coeffs)
            .fold(Rational::one(), |acc, (&i, c)| acc * &c.a[i]);
        out.insert(idx.clone(), w);
        grid::increment(&mut idx, &shape);
    }
    out
}

pub fn error_bound(coeffs: &ReconCoefficients, deriv_norm: f64, h: f64) -> f64 {
    assert!(deriv_norm >= 0.0 && h > 0.0);
    coeffs.err_coeff.abs().to_f64() * deriv_norm * h.powi(2 * coeffs.m as i32 + 2)
}

/// Independent check of [`reconstruct_point_1d`]: fits a polynomial of
/// degree `2m+1` whose cell averages match the window (minimum-norm solution
/// of the underdetermined system) and returns its value at the centre.
pub fn lagrange_oracle_1d(window: &[f64], m: usize) -> Result<f64> {
    let rows = 2 * m + 1;
    if window.len() != rows {
        return Err(Error::WindowLength { expected: rows, got: window.len() });
    }
    let cols = 2 * m + 2;
    // cell j covers [j - 1/2, j + 1/2] in units of h
    let a = DMatrix::from_fn(rows, cols, |r, k| {
        let j = r as f64 - m as f64;
        let e = k as i32 + 1;
        ((j + 0.5).powi(e) - (j - 0.5).powi(e)) / e as f64
    });
    let rhs = DVector::from_column_slice(window);
    let svd = a.clone().svd(true, true);
    let coeffs = svd.solve(&rhs, 1e-12).map_err(|_| Error::Singular)?;
    let residual = (&a * &coeffs - &rhs).amax();
    let scale = rhs.amax().max(1.0);
    if residual > 1e-9 * scale {
        return Err(Error::Singular);
    }
    Ok(coeffs[0])
}
