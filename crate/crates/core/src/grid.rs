//! Uniform k-dimensional grids of q-average samples.

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::real::{dot, Real};

/// Row-major samples on a uniform grid.
///
/// Sample `i` along axis `l` sits at `origin[l] + i * h[l]`. `q` records the
/// discretisation: 0 point values, 1 cell averages, 2 hat averages, and so on.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField<T = f64> {
    shape: Vec<usize>,
    h: Vec<T>,
    origin: Vec<T>,
    q: u32,
    data: Vec<T>,
}

impl<T: Real> GridField<T> {
    pub fn new(shape: Vec<usize>, h: Vec<T>, origin: Vec<T>, q: u32, data: Vec<T>) -> Result<Self> {
        let k = shape.len();
        if k == 0 {
            return Err(Error::InvalidArgument("grid needs at least one axis".into()));
        }
        if h.len() != k || origin.len() != k {
            return Err(Error::InvalidArgument(format!(
                "dims {k} but {} spacings and {} origin coordinates",
                h.len(),
                origin.len()
            )));
        }
        if shape.iter().any(|&n| n == 0) {
            return Err(Error::InvalidArgument("shape entries must be >= 1".into()));
        }
        if h.iter().any(|s| !(s > &T::zero())) {
            return Err(Error::InvalidArgument("spacing must be positive".into()));
        }
        let expected: usize = shape.iter().product();
        if data.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "data has {} values, shape requires {expected}",
                data.len()
            )));
        }
        Ok(GridField { shape, h, origin, q, data })
    }

    /// Same spacing on every axis.
    pub fn uniform(shape: Vec<usize>, h: T, origin: Vec<T>, q: u32, data: Vec<T>) -> Result<Self> {
        let hs = vec![h; shape.len()];
        Self::new(shape, hs, origin, q, data)
    }

    /// Samples `f` at every node, where `f` receives the node coordinates.
    pub fn from_fn(
        shape: Vec<usize>,
        h: Vec<T>,
        origin: Vec<T>,
        q: u32,
        mut f: impl FnMut(&[T]) -> T,
    ) -> Result<Self> {
        let total: usize = shape.iter().product();
        let mut data = Vec::with_capacity(total);
        let mut idx = vec![0usize; shape.len()];
        let mut x = vec![T::zero(); shape.len()];
        for _ in 0..total {
            for l in 0..shape.len() {
                x[l] = origin[l].clone() + T::from_i64(idx[l] as i64) * h[l].clone();
            }
            data.push(f(&x));
            increment(&mut idx, &shape);
        }
        Self::new(shape, h, origin, q, data)
    }

    pub fn k(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn h(&self) -> &[T] {
        &self.h
    }

    pub fn origin(&self) -> &[T] {
        &self.origin
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn with_q(mut self, q: u32) -> Self {
        self.q = q;
        self
    }

    pub fn strides(&self) -> Vec<usize> {
        strides(&self.shape)
    }

    pub fn get(&self, idx: &[usize]) -> &T {
        let s = self.strides();
        let flat: usize = idx.iter().zip(&s).map(|(i, s)| i * s).sum();
        &self.data[flat]
    }

    pub fn coordinate(&self, axis: usize, i: i64) -> T {
        self.origin[axis].clone() + T::from_i64(i) * self.h[axis].clone()
    }

    /// Rebuilds every line along `axis` through `f`, which maps a line of
    /// `shape[axis]` samples to `new_len` samples. Index 0 of the new line
    /// sits at old index `shift`.
    pub fn map_axis(
        &self,
        axis: usize,
        new_len: usize,
        shift: i64,
        mut f: impl FnMut(&[T]) -> Result<Vec<T>>,
    ) -> Result<Self> {
        let n = self.shape[axis];
        let inner: usize = self.shape[axis + 1..].iter().product();
        let outer: usize = self.shape[..axis].iter().product();
        let mut shape = self.shape.clone();
        shape[axis] = new_len;
        let mut data = vec![T::zero(); outer * new_len * inner];
        let mut line = Vec::with_capacity(n);
        for o in 0..outer {
            for c in 0..inner {
                line.clear();
                line.extend((0..n).map(|i| self.data[(o * n + i) * inner + c].clone()));
                let out = f(&line)?;
                debug_assert_eq!(out.len(), new_len);
                for (i, v) in out.into_iter().enumerate() {
                    data[(o * new_len + i) * inner + c] = v;
                }
            }
        }
        let mut origin = self.origin.clone();
        origin[axis] = self.coordinate(axis, shift);
        Ok(GridField { shape, h: self.h.clone(), origin, q: self.q, data })
    }

    /// Valid-mode correlation with a centred odd-length stencil along `axis`.
    /// The axis shrinks by `weights.len() - 1` samples.
    pub fn convolve_axis(&self, axis: usize, weights: &[T]) -> Result<Self> {
        let width = weights.len();
        assert!(width % 2 == 1, "centred stencils have odd length");
        let half = width / 2;
        let n = self.shape[axis];
        if n < width {
            return Err(Error::InsufficientSamples { axis, available: n, required: width, margin: half });
        }
        self.map_axis(axis, n - 2 * half, half as i64, |line| {
            Ok(line.windows(width).map(|w| dot(weights, w)).collect())
        })
    }
}

pub fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; shape.len()];
    for l in (0..shape.len().saturating_sub(1)).rev() {
        s[l] = s[l + 1] * shape[l + 1];
    }
    s
}

/// Row-major odometer step.
pub fn increment(idx: &mut [usize], shape: &[usize]) {
    for l in (0..shape.len()).rev() {
        idx[l] += 1;
        if idx[l] < shape[l] {
            return;
        }
        idx[l] = 0;
    }
}

/// Full tensor product of per-axis centred stencils, row-major.
pub fn expand_tensor(stencils: &[Vec<Rational>]) -> (Vec<usize>, Vec<Rational>) {
    let shape: Vec<usize> = stencils.iter().map(Vec::len).collect();
    let total: usize = shape.iter().product();
    let mut idx = vec![0usize; shape.len()];
    let mut weights = Vec::with_capacity(total);
    for _ in 0..total {
        let w = idx
            .iter()
            .zip(stencils)
            .fold(Rational::one(), |acc, (&i, s)| acc * &s[i]);
        weights.push(w);
        increment(&mut idx, &shape);
    }
    (shape, weights)
}

/// Applies an expanded k-dimensional stencil directly (no axis splitting).
pub fn apply_tensor_direct<T: Real>(
    field: &GridField<T>,
    stencil_shape: &[usize],
    weights: &[T],
) -> Result<GridField<T>> {
    let k = field.k();
    assert_eq!(stencil_shape.len(), k);
    let mut out_shape = Vec::with_capacity(k);
    for (axis, (&n, &w)) in field.shape().iter().zip(stencil_shape).enumerate() {
        if n < w {
            return Err(Error::InsufficientSamples { axis, available: n, required: w, margin: w / 2 });
        }
        out_shape.push(n - w + 1);
    }
    let fs = field.strides();
    let total: usize = out_shape.iter().product();
    let stencil_total: usize = stencil_shape.iter().product();
    let mut data = Vec::with_capacity(total);
    let mut oi = vec![0usize; k];
    for _ in 0..total {
        let mut si = vec![0usize; k];
        let mut acc = T::zero();
        for wi in 0..stencil_total {
            let flat: usize = (0..k).map(|l| (oi[l] + si[l]) * fs[l]).sum();
            acc = acc + weights[wi].clone() * field.data()[flat].clone();
            increment(&mut si, stencil_shape);
        }
        data.push(acc);
        increment(&mut oi, &out_shape);
    }
    let origin = (0..k)
        .map(|l| field.coordinate(l, (stencil_shape[l] / 2) as i64))
        .collect();
    GridField::new(out_shape, field.h().to_vec(), origin, field.q(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inconsistent_geometry() {
        assert!(GridField::new(vec![2, 2], vec![1.0, 1.0], vec![0.0, 0.0], 1, vec![0.0; 3]).is_err());
        assert!(GridField::new(vec![2], vec![0.0], vec![0.0], 1, vec![0.0; 2]).is_err());
        assert!(GridField::new(vec![0], vec![1.0], vec![0.0], 1, vec![]).is_err());
        assert!(GridField::<f64>::new(vec![], vec![], vec![], 1, vec![]).is_err());
    }

    #[test]
    fn convolve_axis_shrinks_and_shifts() {
        let f = GridField::uniform(vec![5], 0.5, vec![1.0], 1, vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let g = f.convolve_axis(0, &[1.0, -2.0, 1.0]).unwrap();
        assert_eq!(g.shape(), &[3]);
        assert_eq!(g.origin(), &[1.5]);
        assert_eq!(g.data(), &[0.0, 0.0, 0.0]);
        assert!(matches!(
            f.convolve_axis(0, &[1.0; 7]),
            Err(Error::InsufficientSamples { required: 7, .. })
        ));
    }

    #[test]
    fn convolve_second_axis_of_2d() {
        let f = GridField::from_fn(vec![2, 4], vec![1.0, 1.0], vec![0.0, 0.0], 0, |x| x[0] * 10.0 + x[1])
            .unwrap();
        let g = f.convolve_axis(1, &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(g.shape(), &[2, 2]);
        assert_eq!(g.data(), &[1.0, 2.0, 11.0, 12.0]);
    }

    #[test]
    fn tensor_expansion_row_major() {
        let a = vec![Rational::frac(1, 2), Rational::frac(1, 3)];
        let b = vec![Rational::one(), Rational::frac(2, 1), Rational::frac(3, 1)];
        let (shape, w) = expand_tensor(&[a, b]);
        assert_eq!(shape, vec![2, 3]);
        assert_eq!(w[1], Rational::one());
        assert_eq!(w[5], Rational::one());
        assert_eq!(w[3], Rational::frac(1, 3));
    }
}
