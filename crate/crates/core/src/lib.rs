//! High-order point values and global B-spline quasi-interpolants from
//! cell-average and general q-average grid data.
//!
//! * [`exact`]: arbitrary-precision rationals for coefficient tables.
//! * [`cell2point`]: cell-average to point-value reconstruction in 1D and kD.
//! * [`bspline`]: centred cardinal B-splines, averaging kernels and q-average sampling.
//! * [`quasiinterp`]: `L_p` functionals and the quasi-interpolants `Q_p^q`.
//! * [`boundary`]: ghost samples by polynomial extrapolation.
//! * [`harness`]: grid files, test functions, convergence studies and the CLI.

pub mod boundary;
pub mod bspline;
pub mod cell2point;
pub mod error;
pub mod exact;
pub mod grid;
pub mod harness;
pub mod poly;
pub mod quasiinterp;
pub mod real;
pub mod wide;

pub use error::{Error, Result};
pub use exact::Rational;
pub use grid::GridField;
pub use real::Real;
