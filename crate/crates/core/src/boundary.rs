//! Ghost samples for bounded grids.
//!
//! The q-average sequence itself is extrapolated (averaging maps polynomials
//! of degree d to sequences of degree d), so a degree-d fit keeps ghost
//! values within O(h^{d+1}) of the true averages. Extrapolation uses the
//! Newton forward form on integer abscissae:
//! `v(-g) = Σ_k (-1)^k C(g+k-1, k) Δ^k v_0`.

use crate::error::{Error, Result};
use crate::exact::{binomial, Rational};
use crate::grid::GridField;
use crate::real::Real;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionSpec {
    pub ghosts_per_side: Vec<usize>,
    pub fit_degree: usize,
}

/// Which consumer a margin is computed for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarginMode {
    Reconstruction { m: usize },
    Quasi { p: usize, q: usize },
}

/// Samples needed beyond the data on each side.
///
/// Quasi mode: `⌈q/2 + (p+1)/2⌉ + ⌊(p+q)/2⌋`.
pub fn required_margin(mode: MarginMode) -> usize {
    match mode {
        MarginMode::Reconstruction { m } => m,
        MarginMode::Quasi { p, q } => (p + q + 1).div_ceil(2) + (p + q) / 2,
    }
}

/// Forward differences `Δ^k v_0`, `k = 0..=degree`.
fn forward_differences<T: Real>(values: &[T], degree: usize) -> Vec<T> {
    let mut row: Vec<T> = values[..=degree].to_vec();
    let mut out = Vec::with_capacity(degree + 1);
    for _ in 0..=degree {
        out.push(row[0].clone());
        row = row.windows(2).map(|w| w[1].clone() - w[0].clone()).collect();
    }
    out
}

/// Values of the degree-`degree` interpolant through `values[0..=degree]` at
/// abscissae `-1, -2, …, -ghosts`, nearest first.
fn extrapolate_left<T: Real>(values: &[T], ghosts: usize, degree: usize) -> Vec<T> {
    let diffs = forward_differences(values, degree);
    (1..=ghosts as u64)
        .map(|g| {
            diffs.iter().enumerate().fold(T::zero(), |acc, (k, d)| {
                let c = T::from_rational(&Rational::from_integer(binomial(g + k as u64 - 1, k as u64)));
                let term = c * d.clone();
                if k % 2 == 0 {
                    acc + term
                } else {
                    acc - term
                }
            })
        })
        .collect()
}

/// Adds `ghosts` extrapolated samples to both ends of every line along `axis`.
pub fn extend_axis<T: Real>(field: &GridField<T>, axis: usize, ghosts: usize, fit_degree: usize) -> Result<GridField<T>> {
    if ghosts == 0 {
        return Ok(field.clone());
    }
    let n = field.shape()[axis];
    if n < fit_degree + 1 {
        return Err(Error::InsufficientSamples { axis, available: n, required: fit_degree + 1, margin: ghosts });
    }
    field.map_axis(axis, n + 2 * ghosts, -(ghosts as i64), |line| {
        let left = extrapolate_left(line, ghosts, fit_degree);
        let reversed: Vec<T> = line.iter().rev().cloned().collect();
        let right = extrapolate_left(&reversed, ghosts, fit_degree);
        let mut out = Vec::with_capacity(n + 2 * ghosts);
        out.extend(left.into_iter().rev());
        out.extend_from_slice(line);
        out.extend(right);
        Ok(out)
    })
}

/// Axis-by-axis extension in ascending axis order; corners come from
/// extending already-extended lines.
pub fn extend_field<T: Real>(field: &GridField<T>, spec: &ExtensionSpec) -> Result<GridField<T>> {
    if spec.ghosts_per_side.len() != field.k() {
        return Err(Error::InvalidArgument(format!(
            "{} ghost counts for a {}-dimensional field",
            spec.ghosts_per_side.len(),
            field.k()
        )));
    }
    let mut out = field.clone();
    for (axis, &g) in spec.ghosts_per_side.iter().enumerate() {
        out = extend_axis(&out, axis, g, spec.fit_degree)?;
    }
    Ok(out)
}
