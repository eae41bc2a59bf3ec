//! Scalar abstraction for the grid kernels.
//!
//! Stencils, B-spline evaluation and boundary extension are written once over
//! [`Real`]. `f64` is the production scalar; [`Rational`] runs the same code
//! path exactly, which convergence studies use to keep the arithmetic floor
//! far below high-order truncation errors.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::ToPrimitive;

use crate::exact::Rational;

pub trait Real:
    Clone
    + Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn floor_i64(&self) -> i64;
    fn ceil_i64(&self) -> i64;
    fn abs(&self) -> Self;
    fn is_finite(&self) -> bool;

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Real for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_rational(r: &Rational) -> Self {
        r.to_f64()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn floor_i64(&self) -> i64 {
        self.floor() as i64
    }
    fn ceil_i64(&self) -> i64 {
        self.ceil() as i64
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn powi(&self, n: u32) -> Self {
        f64::powi(*self, n as i32)
    }
}

impl Real for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn from_i64(n: i64) -> Self {
        Rational::from_integer(n)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }
    fn floor_i64(&self) -> i64 {
        self.floor().to_i64().expect("floor fits in i64")
    }
    fn ceil_i64(&self) -> i64 {
        self.ceil().to_i64().expect("ceil fits in i64")
    }
    fn abs(&self) -> Self {
        Rational::abs(self)
    }
    fn is_finite(&self) -> bool {
        true
    }
    fn powi(&self, n: u32) -> Self {
        self.pow(n)
    }
}

/// Fixed left-to-right dot product.
pub fn dot<T: Real>(weights: &[T], values: &[T]) -> T {
    debug_assert_eq!(weights.len(), values.len());
    weights
        .iter()
        .zip(values)
        .fold(T::zero(), |acc, (w, v)| acc + w.clone() * v.clone())
}

pub fn max_abs<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    values.into_iter().fold(T::zero(), |acc, v| {
        let a = v.abs();
        if a > acc {
            a
        } else {
            acc
        }
    })
}
