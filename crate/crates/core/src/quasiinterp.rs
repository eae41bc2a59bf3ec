//! Spline quasi-interpolation from q-average data.
//!
//! The functional `L_p` is the symmetric stencil `Σ_j c_{p,j} f_{n+j}`, which
//! makes `Q_p f = Σ_n L_p(f_{n,·}) B_p(x/h - n)` reproduce polynomials of
//! degree `p`. Convolving with `ω^q` raises the spline degree by `q`, so
//! applying `L_{p+q}` to q-averages gives the same coefficients as `L_p` on
//! point values for every polynomial of degree `p`. That yields
//! `Q_p^q f = Σ_n L_{p+q}(f^q_{n,·}) B_p(x/h - n)` with order `h^{p+1}`.

use std::collections::HashMap;

use crate::bspline::BSplineBasis;
use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, Rational};
use crate::grid::{self, GridField};
use crate::real::{dot, Real};

/// Largest functional order accepted by [`quasi_coefficients`].
pub const MAX_ORDER: usize = 16;

/// Central factorial numbers of the first kind `t(i, j)`:
/// `x ∏_{l=1}^{i-1} (x + i/2 - l) = Σ_j t(i, j) x^j`.
pub fn central_factorial_t(i: usize, j: usize) -> Rational {
    let mut memo = HashMap::new();
    cfn(i, j, &mut memo)
}

fn cfn(i: usize, j: usize, memo: &mut HashMap<(usize, usize), Rational>) -> Rational {
    if j > i {
        return Rational::zero();
    }
    if j == i {
        return Rational::one();
    }
    if j == 0 {
        return Rational::zero();
    }
    if j == 1 {
        // i >= 2 here
        let half = Rational::frac(i as i64, 2);
        return (1..i as i64).fold(Rational::one(), |acc, l| acc * (&half - &Rational::from_integer(l)));
    }
    if let Some(v) = memo.get(&(i, j)) {
        return v.clone();
    }
    let shift = Rational::frac(i as i64 - 2, 2);
    let v = cfn(i - 2, j - 2, memo) - shift.pow(2) * cfn(i - 2, j, memo);
    memo.insert((i, j), v.clone());
    v
}

/// Half-stencil `c_{p,0..=⌊p/2⌋}` of `L_p` and its operator norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiCoefficients {
    p: usize,
    c: Vec<Rational>,
    norm: Rational,
}

impl QuasiCoefficients {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn c(&self) -> &[Rational] {
        &self.c
    }

    /// `‖L_p‖_∞ = Σ_j |c_{p,j}|` over the full stencil.
    pub fn norm(&self) -> &Rational {
        &self.norm
    }

    pub fn half_width(&self) -> usize {
        self.p / 2
    }

    /// `c_{p,-w}, …, c_{p,w}`.
    pub fn full_stencil(&self) -> Vec<Rational> {
        let w = self.half_width();
        (0..=2 * w)
            .map(|i| self.c[(i as i64 - w as i64).unsigned_abs() as usize].clone())
            .collect()
    }

    pub fn stencil_as<T: Real>(&self) -> Vec<T> {
        self.full_stencil().iter().map(T::from_rational).collect()
    }
}

/// `c_{p,j} = Σ_{l=|j|}^{⌊p/2⌋} t(2l+p+1, p+1) / C(2l+p+1, p+1) · (-1)^{l-j} / ((l-j)! (l+j)!)`.
pub fn quasi_coefficients(p: usize) -> Result<QuasiCoefficients> {
    if p == 0 || p > MAX_ORDER {
        return Err(Error::InvalidArgument(format!("functional order must be in 1..={MAX_ORDER}, got {p}")));
    }
    let w = p / 2;
    let mut memo = HashMap::new();
    let weights: Vec<Rational> = (0..=w)
        .map(|l| {
            let top = 2 * l + p + 1;
            cfn(top, p + 1, &mut memo) / Rational::from_integer(binomial(top as u64, p as u64 + 1))
        })
        .collect();
    let c: Vec<Rational> = (0..=w)
        .map(|j| {
            (j..=w)
                .map(|l| {
                    let i = l - j;
                    let den = factorial(i as u64) * factorial((2 * l - i) as u64);
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    &weights[l] * &Rational::new(sign, den).expect("nonzero")
                })
                .sum()
        })
        .collect();
    let norm = c
        .iter()
        .enumerate()
        .map(|(j, v)| if j == 0 { v.abs() } else { v.abs() * Rational::from_integer(2) })
        .sum();
    Ok(QuasiCoefficients { p, c, norm })
}

/// `L_p` applied to a window of `2⌊p/2⌋+1` samples.
pub fn apply_l<T: Real>(coeffs: &QuasiCoefficients, window: &[T]) -> Result<T> {
    let expected = 2 * coeffs.half_width() + 1;
    if window.len() != expected {
        return Err(Error::WindowLength { expected, got: window.len() });
    }
    Ok(dot(&coeffs.stencil_as::<T>(), window))
}

/// Evaluable tensor-product spline `Σ_n ctrl[n] ∏_l B_{p_l}((x_l - o_l)/h_l - n_l)`.
#[derive(Clone, Debug)]
pub struct QuasiInterpolant<T = f64> {
    p_per_axis: Vec<usize>,
    q: u32,
    ctrl: GridField<T>,
    bases: Vec<BSplineBasis<T>>,
    half_supports: Vec<T>,
    bounds: Vec<(T, T)>,
}

impl<T: Real> QuasiInterpolant<T> {
    pub fn k(&self) -> usize {
        self.p_per_axis.len()
    }

    pub fn p_per_axis(&self) -> &[usize] {
        &self.p_per_axis
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn h_per_axis(&self) -> &[T] {
        self.ctrl.h()
    }

    /// Coordinate of control index 0 along each axis.
    pub fn origin(&self) -> &[T] {
        self.ctrl.origin()
    }

    /// The values `L_{p+q}(f^q)` on the control grid.
    pub fn ctrl(&self) -> &GridField<T> {
        &self.ctrl
    }

    /// Per-axis closed interval on which every active basis function has a
    /// control value.
    pub fn domain_box(&self) -> Vec<(T, T)> {
        self.bounds.clone()
    }

    pub fn evaluate(&self, x: &[T]) -> Result<T> {
        if x.len() != self.k() {
            return Err(Error::InvalidArgument(format!("expected {} coordinates, got {}", self.k(), x.len())));
        }
        let outside = || Error::OutsideDomain(x.iter().map(Real::to_f64).collect());
        let mut active: Vec<Vec<(usize, T)>> = Vec::with_capacity(self.k());
        for (l, ((xl, (lo, hi)), basis)) in x.iter().zip(&self.bounds).zip(&self.bases).enumerate() {
            if xl < lo || xl > hi {
                return Err(outside());
            }
            let t = (xl.clone() - self.ctrl.origin()[l].clone()) / self.ctrl.h()[l].clone();
            let a = &self.half_supports[l];
            let first = (t.clone() - a.clone()).ceil_i64().max(0);
            let last = (t.clone() + a.clone()).floor_i64().min(self.ctrl.shape()[l] as i64 - 1);
            let terms = (first..=last)
                .map(|n| (n as usize, basis.eval(&(t.clone() - T::from_i64(n)))))
                .collect();
            active.push(terms);
        }
        let strides = self.ctrl.strides();
        let counts: Vec<usize> = active.iter().map(Vec::len).collect();
        if counts.iter().any(|&c| c == 0) {
            return Err(outside());
        }
        let total: usize = counts.iter().product();
        let mut pick = vec![0usize; self.k()];
        let mut acc = T::zero();
        for _ in 0..total {
            let mut weight = T::one();
            let mut flat = 0;
            for l in 0..self.k() {
                let (n, b) = &active[l][pick[l]];
                weight = weight * b.clone();
                flat += n * strides[l];
            }
            acc = acc + weight * self.ctrl.data()[flat].clone();
            grid::increment(&mut pick, &counts);
        }
        Ok(acc)
    }
}

/// `Q_p^q` on a 1D field.
pub fn build_quasi_interpolant_1d<T: Real>(field: &GridField<T>, p: usize, q: u32) -> Result<QuasiInterpolant<T>> {
    if field.k() != 1 {
        return Err(Error::InvalidArgument(format!("expected a 1D field, got {} dims", field.k())));
    }
    build_quasi_interpolant_kd(field, &[p], q)
}

/// Tensor-product `Q_p^q`: control values by successive 1D passes of
/// `L_{p_l+q}`, basis degree `p_l` per axis.
pub fn build_quasi_interpolant_kd<T: Real>(
    field: &GridField<T>,
    p_per_axis: &[usize],
    q: u32,
) -> Result<QuasiInterpolant<T>> {
    if field.q() != q {
        return Err(Error::QMismatch { field: field.q(), expected: q });
    }
    if p_per_axis.len() != field.k() {
        return Err(Error::InvalidArgument(format!(
            "{} degrees for a {}-dimensional field",
            p_per_axis.len(),
            field.k()
        )));
    }
    let mut ctrl = field.clone();
    for (axis, &p) in p_per_axis.iter().enumerate() {
        let coeffs = quasi_coefficients(p + q as usize)?;
        let w = coeffs.half_width();
        // the control grid must also carry the p+2 basis functions around each point
        let required = 2 * w + p + 2;
        let available = field.shape()[axis];
        if available < required {
            return Err(Error::InsufficientSamples { axis, available, required, margin: w });
        }
        ctrl = ctrl.convolve_axis(axis, &coeffs.stencil_as::<T>())?;
    }
    let bases = p_per_axis.iter().map(|&p| BSplineBasis::new(p)).collect();
    let half_supports: Vec<T> = p_per_axis
        .iter()
        .map(|&p| T::from_rational(&Rational::frac(p as i64 + 1, 2)))
        .collect();
    let bounds = half_supports
        .iter()
        .enumerate()
        .map(|(l, a)| {
            let h = ctrl.h()[l].clone();
            let o = ctrl.origin()[l].clone();
            let last = T::from_i64(ctrl.shape()[l] as i64 - 1);
            (o.clone() + a.clone() * h.clone(), o + (last - a.clone()) * h)
        })
        .collect();
    Ok(QuasiInterpolant { p_per_axis: p_per_axis.to_vec(), q, ctrl, bases, half_supports, bounds })
}

/// Control values from the expanded tensor stencil in one pass; the oracle
/// for the axis-by-axis construction.
pub fn ctrl_direct<T: Real>(field: &GridField<T>, p_per_axis: &[usize], q: u32) -> Result<GridField<T>> {
    let per_axis = p_per_axis
        .iter()
        .map(|&p| quasi_coefficients(p + q as usize).map(|c| c.full_stencil()))
        .collect::<Result<Vec<_>>>()?;
    let (shape, weights) = grid::expand_tensor(&per_axis);
    let weights: Vec<T> = weights.iter().map(T::from_rational).collect();
    grid::apply_tensor_direct(field, &shape, &weights)
}

/// `α = (q/2 + (p+1)/2 + ⌊(p+q)/2⌋)^{p+1}`.
pub fn alpha(p: usize, q: u32) -> f64 {
    let q = q as usize;
    let base = Rational::frac((q + p + 1) as i64, 2) + Rational::from_integer(((p + q) / 2) as i64);
    base.pow(p as u32 + 1).to_f64()
}

/// `((p+2) α ‖L_{p+q}‖_∞ + 1) C h^{p+1}` with `C = ‖f^{(p+1)}‖_∞ / (p+1)!`.
pub fn error_bound_quasi(p: usize, q: u32, c: f64, h: f64) -> Result<f64> {
    assert!(c >= 0.0 && h > 0.0);
    let norm = quasi_coefficients(p + q as usize)?.norm().to_f64();
    Ok(((p as f64 + 2.0) * alpha(p, q) * norm + 1.0) * c * h.powi(p as i32 + 1))
}
