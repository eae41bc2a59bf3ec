//! Convergence-order studies under repeated halving of the grid spacing.
//!
//! Level `l` splits every axis of the domain into `base_cells · 2^l` cells and
//! places samples at the cell centres. Reconstruction is scored at those
//! centres; quasi-interpolants at `10 N + 1` equispaced points per axis.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;
use std::thread;

use crate::boundary::{self, ExtensionSpec, MarginMode};
use crate::cell2point;
use crate::error::{Error, Result};
use crate::exact::{factorial, Rational};
use crate::grid::{self, GridField};
use crate::quasiinterp;
use crate::real::Real;

use super::registry::{Sampled, TestFunction};

/// Points per cell used to score quasi-interpolants.
pub const OVERSAMPLE: usize = 10;

/// Domain endpoint `c` or `c π` with rational `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endpoint {
    pub coeff: Rational,
    pub times_pi: bool,
}

impl Endpoint {
    pub fn value<T: Sampled>(&self) -> T {
        if self.times_pi {
            T::pi_times(&self.coeff)
        } else {
            T::from_rational(&self.coeff)
        }
    }
}

impl FromStr for Endpoint {
    type Err = Error;

    /// `"0.5"`, `"-1/3"`, `"pi"`, `"2pi"`, `"-pi"`, `"1/2*pi"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Usage(format!("bad domain endpoint {s:?}"));
        match s.strip_suffix("pi") {
            Some(c) => {
                let c = c.strip_suffix('*').unwrap_or(c);
                let coeff = match c {
                    "" | "+" => Rational::one(),
                    "-" => -Rational::one(),
                    _ => c.parse().map_err(|_| bad())?,
                };
                Ok(Endpoint { coeff, times_pi: true })
            }
            None => Ok(Endpoint { coeff: s.parse().map_err(|_| bad())?, times_pi: false }),
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.times_pi {
            write!(f, "{}pi", self.coeff)
        } else {
            write!(f, "{}", self.coeff)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Reconstruct { m: usize },
    Quasi { p: usize, q: u32 },
}

/// How samples beyond the domain are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Extrapolate from in-domain samples. `None` picks the defaults.
    Ghost { ghosts: Option<usize>, fit_degree: Option<usize> },
    /// Sample the test function beyond the domain.
    Supplied,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Double,
    /// Rational arithmetic on 256-bit samples of the test function.
    Exact,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub method: Method,
    pub function: TestFunction,
    pub domain: Vec<(Endpoint, Endpoint)>,
    pub levels: usize,
    pub base_cells: usize,
    pub boundary: BoundaryMode,
    pub precision: Precision,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.levels < 2 {
            return Err(Error::Usage("at least two refinement levels are needed".into()));
        }
        if self.base_cells == 0 {
            return Err(Error::Usage("base cell count must be positive".into()));
        }
        if self.domain.is_empty() {
            return Err(Error::Usage("domain needs at least one axis".into()));
        }
        for (a, b) in &self.domain {
            if !(a.value::<f64>() < b.value::<f64>()) {
                return Err(Error::Usage(format!("empty interval [{a}, {b}]")));
            }
        }
        match self.method {
            Method::Quasi { p, q } => {
                if p == 0 || p + q as usize > quasiinterp::MAX_ORDER {
                    return Err(Error::Usage(format!(
                        "need p >= 1 and p + q <= {}",
                        quasiinterp::MAX_ORDER
                    )));
                }
            }
            Method::Reconstruct { m } => {
                if m > MAX_RECON_M {
                    return Err(Error::Usage(format!("m must be at most {MAX_RECON_M}")));
                }
            }
        }
        if self.precision == Precision::Exact && !self.function.has_exact_averages() {
            return Err(Error::Usage(format!(
                "{} has no high-precision sampler; use double precision",
                self.function
            )));
        }
        Ok(())
    }

    pub fn theoretical_order(&self) -> usize {
        match self.method {
            Method::Reconstruct { m } => 2 * m + 2,
            Method::Quasi { p, .. } => p + 1,
        }
    }

    /// Samples generated or extrapolated beyond each end of every axis.
    pub fn ghosts(&self) -> usize {
        let auto = match self.method {
            Method::Reconstruct { m } => m,
            Method::Quasi { p, q } => quasi_ghosts(p, q),
        };
        match self.boundary {
            BoundaryMode::Ghost { ghosts: Some(g), .. } => g,
            _ => auto,
        }
    }

    fn fit_degree(&self) -> usize {
        let auto = match self.method {
            Method::Reconstruct { m } => 2 * m + 1,
            Method::Quasi { p, .. } => p,
        };
        match self.boundary {
            BoundaryMode::Ghost { fit_degree: Some(d), .. } => d,
            _ => auto,
        }
    }

    fn describe(&self) -> Vec<String> {
        let method = match self.method {
            Method::Reconstruct { m } => format!("mode=reconstruct m={m}"),
            Method::Quasi { p, q } => format!("mode=quasi p={p} q={q}"),
        };
        let domain: Vec<String> = self.domain.iter().map(|(a, b)| format!("[{a},{b}]")).collect();
        let boundary = match self.boundary {
            BoundaryMode::Supplied => "supplied".to_string(),
            BoundaryMode::Ghost { .. } => {
                format!("ghost ghosts={} fit_degree={}", self.ghosts(), self.fit_degree())
            }
        };
        let precision = match self.precision {
            Precision::Double => "double",
            Precision::Exact => "exact",
        };
        vec![
            format!("{method} function={}", self.function),
            format!("domain={} levels={} base_cells={}", domain.join("x"), self.levels, self.base_cells),
            format!("boundary={boundary} precision={precision}"),
            format!("theoretical_order={}", self.theoretical_order()),
        ]
    }
}

/// Largest reconstruction half-width the runner accepts.
pub const MAX_RECON_M: usize = 12;

/// Ghosts for quasi-interpolation: at least the theorem's margin, and
/// enough that the evaluation box covers the cell-centred domain with half
/// a cell to spare.
pub fn quasi_ghosts(p: usize, q: u32) -> usize {
    let margin = boundary::required_margin(MarginMode::Quasi { p, q: q as usize });
    margin.max((p + q as usize) / 2 + p / 2 + 2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderRow {
    pub h: f64,
    pub max_error: f64,
    pub order: Option<f64>,
    pub bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderReport {
    pub comments: Vec<String>,
    pub theoretical_order: usize,
    pub rows: Vec<OrderRow>,
}

impl OrderReport {
    pub fn final_order(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.order)
    }

    /// Every row with a bound has error at most that bound.
    pub fn bound_dominates(&self) -> bool {
        self.rows.iter().all(|r| r.bound.is_none_or(|b| r.max_error <= b))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        out.push_str("h,max_error,order,bound\n");
        for r in &self.rows {
            let order = r.order.map_or_else(|| "-".to_string(), |o| format!("{o:.4}"));
            let bound = r.bound.map_or_else(|| "-".to_string(), |b| format!("{b:.6e}"));
            let _ = writeln!(out, "{:.6e},{:.6e},{order},{bound}", r.h, r.max_error);
        }
        out
    }
}

/// Runs every level (in parallel) and assembles the report in level order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<OrderReport> {
    spec.validate()?;
    let levels: Vec<Result<(f64, f64, Option<f64>)>> = thread::scope(|s| {
        let handles: Vec<_> = (0..spec.levels)
            .map(|l| {
                let cells = spec.base_cells << l;
                s.spawn(move || match spec.precision {
                    Precision::Double => run_level::<f64>(spec, cells),
                    Precision::Exact => run_level::<Rational>(spec, cells),
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("level worker panicked")).collect()
    });
    let mut rows: Vec<OrderRow> = Vec::with_capacity(levels.len());
    for level in levels {
        let (h, max_error, bound) = level?;
        let order = rows.last().map(|prev| (prev.max_error / max_error).log2());
        rows.push(OrderRow { h, max_error, order, bound });
    }
    Ok(OrderReport { comments: spec.describe(), theoretical_order: spec.theoretical_order(), rows })
}

struct Axis<T> {
    a: T,
    h: T,
    cells: usize,
}

/// Returns `(h of axis 0, max error, bound)` for one level.
fn run_level<T: Sampled>(spec: &ExperimentSpec, cells: usize) -> Result<(f64, f64, Option<f64>)> {
    let axes: Vec<Axis<T>> = spec
        .domain
        .iter()
        .map(|(a, b)| {
            let a: T = a.value();
            let b: T = b.value();
            let h = (b - a.clone()) / T::from_i64(cells as i64);
            Axis { a, h, cells }
        })
        .collect();
    let g = spec.ghosts();
    let generated = match spec.boundary {
        BoundaryMode::Supplied => g,
        BoundaryMode::Ghost { .. } => 0,
    };
    let q = match spec.method {
        Method::Reconstruct { .. } => 1,
        Method::Quasi { q, .. } => q,
    };
    let mut field = sample_field(&spec.function, &axes, q, generated)?;
    if generated < g {
        let ext = ExtensionSpec { ghosts_per_side: vec![g; axes.len()], fit_degree: spec.fit_degree() };
        field = boundary::extend_field(&field, &ext)?;
    }
    let max_error = match spec.method {
        Method::Reconstruct { m } => reconstruction_error(&spec.function, &axes, &field, m, g)?,
        Method::Quasi { p, q } => quasi_error(&spec.function, &axes, &field, p, q)?,
    };
    let h = axes[0].h.to_f64();
    let bound = if axes.len() == 1 { Some(bound(spec, &axes[0], g)) } else { None };
    Ok((h, max_error, bound))
}

/// Cell-centred samples with `extra` additional cells on each side.
fn sample_field<T: Sampled>(f: &TestFunction, axes: &[Axis<T>], q: u32, extra: usize) -> Result<GridField<T>> {
    let half = T::from_rational(&Rational::frac(1, 2));
    let mut per_axis = Vec::with_capacity(axes.len());
    let mut origin = Vec::with_capacity(axes.len());
    for ax in axes {
        let x0 = ax.a.clone() + (half.clone() - T::from_i64(extra as i64)) * ax.h.clone();
        let values = (0..ax.cells + 2 * extra)
            .map(|i| T::average(f, q, &ax.h, &(x0.clone() + T::from_i64(i as i64) * ax.h.clone())))
            .collect::<Result<Vec<T>>>()?;
        per_axis.push(values);
        origin.push(x0);
    }
    let h = axes.iter().map(|ax| ax.h.clone()).collect();
    GridField::new(
        per_axis.iter().map(Vec::len).collect(),
        h,
        origin,
        q,
        outer_product(&per_axis),
    )
}

fn outer_product<T: Real>(factors: &[Vec<T>]) -> Vec<T> {
    let shape: Vec<usize> = factors.iter().map(Vec::len).collect();
    let total: usize = shape.iter().product();
    let mut idx = vec![0usize; shape.len()];
    let mut out = Vec::with_capacity(total);
    for _ in 0..total {
        let v = idx.iter().zip(factors).fold(T::one(), |acc, (&i, f)| acc * f[i].clone());
        out.push(v);
        grid::increment(&mut idx, &shape);
    }
    out
}

fn reconstruction_error<T: Sampled>(
    f: &TestFunction,
    axes: &[Axis<T>],
    field: &GridField<T>,
    m: usize,
    g: usize,
) -> Result<f64> {
    if g < m {
        return Err(Error::Usage(format!("reconstruction needs at least {m} ghosts per side")));
    }
    let coeffs = vec![cell2point::solve_coefficients(m); axes.len()];
    let mut points = cell2point::reconstruct_grid_valid(field, &coeffs)?;
    for axis in 0..axes.len() {
        points = crop_axis(&points, axis, g - m)?;
    }
    let half = T::from_rational(&Rational::frac(1, 2));
    let exact: Vec<Vec<T>> = axes
        .iter()
        .map(|ax| {
            (0..ax.cells)
                .map(|i| T::point(f, &(ax.a.clone() + (T::from_i64(i as i64) + half.clone()) * ax.h.clone())))
                .collect()
        })
        .collect::<Result<_>>()?;
    let exact = outer_product(&exact);
    let diffs = points.data().iter().zip(&exact).map(|(r, e)| r.clone() - e.clone());
    Ok(crate::real::max_abs(diffs).to_f64())
}

/// Drops `c` samples from each end of `axis`.
pub fn crop_axis<T: Real>(field: &GridField<T>, axis: usize, c: usize) -> Result<GridField<T>> {
    if c == 0 {
        return Ok(field.clone());
    }
    let n = field.shape()[axis];
    if n <= 2 * c {
        return Err(Error::InsufficientSamples { axis, available: n, required: 2 * c + 1, margin: c });
    }
    field.map_axis(axis, n - 2 * c, c as i64, |line| Ok(line[c..n - c].to_vec()))
}

fn quasi_error<T: Sampled>(
    f: &TestFunction,
    axes: &[Axis<T>],
    field: &GridField<T>,
    p: usize,
    q: u32,
) -> Result<f64> {
    let interp = quasiinterp::build_quasi_interpolant_kd(field, &vec![p; axes.len()], q)?;
    let per_axis: Vec<Vec<(T, T)>> = axes
        .iter()
        .map(|ax| {
            let n = OVERSAMPLE * ax.cells;
            (0..=n)
                .map(|j| {
                    let x = ax.a.clone() + T::from_i64(j as i64) * ax.h.clone() / T::from_i64(OVERSAMPLE as i64);
                    T::point(f, &x).map(|v| (x, v))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let shape: Vec<usize> = per_axis.iter().map(Vec::len).collect();
    let total: usize = shape.iter().product();
    let mut idx = vec![0usize; shape.len()];
    let mut worst = T::zero();
    for _ in 0..total {
        let x: Vec<T> = idx.iter().zip(&per_axis).map(|(&i, a)| a[i].0.clone()).collect();
        let exact = idx.iter().zip(&per_axis).fold(T::one(), |acc, (&i, a)| acc * a[i].1.clone());
        let err = (interp.evaluate(&x)? - exact).abs();
        if err > worst {
            worst = err;
        }
        grid::increment(&mut idx, &shape);
    }
    Ok(worst.to_f64())
}

/// Error bound for a 1D level; derivative norms are taken over the whole
/// sampled interval including ghosts.
fn bound<T: Sampled>(spec: &ExperimentSpec, ax: &Axis<T>, g: usize) -> f64 {
    let h = ax.h.to_f64();
    let a = ax.a.to_f64();
    let b = a + h * ax.cells as f64;
    let reach = (g as f64 + 1.0) * h;
    let (lo, hi) = (a - reach, b + reach);
    match spec.method {
        Method::Reconstruct { m } => {
            let c = cell2point::solve_coefficients(m);
            cell2point::error_bound(&c, spec.function.derivative_norm(2 * m + 2, lo, hi), h)
        }
        Method::Quasi { p, q } => {
            let fact = Rational::from_integer(factorial(p as u64 + 1)).to_f64();
            let c = spec.function.derivative_norm(p + 1, lo, hi) / fact;
            quasiinterp::error_bound_quasi(p, q, c, h).unwrap_or(f64::INFINITY)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(method: Method, function: &str, domain: (&str, &str), boundary: BoundaryMode, precision: Precision) -> ExperimentSpec {
        ExperimentSpec {
            method,
            function: function.parse().unwrap(),
            domain: vec![(domain.0.parse().unwrap(), domain.1.parse().unwrap())],
            levels: 3,
            base_cells: 16,
            boundary,
            precision,
        }
    }

    #[test]
    fn endpoints() {
        let e: Endpoint = "2pi".parse().unwrap();
        assert!((e.value::<f64>() - 2.0 * std::f64::consts::PI).abs() < 1e-15);
        assert_eq!("-1/2*pi".parse::<Endpoint>().unwrap().coeff, Rational::frac(-1, 2));
        assert_eq!("0.25".parse::<Endpoint>().unwrap().value::<f64>(), 0.25);
        assert!("tau".parse::<Endpoint>().is_err());
    }

    #[test]
    fn cubic_is_reconstructed_exactly() {
        let s = spec(
            Method::Reconstruct { m: 1 },
            "poly:1,-1,2,1",
            ("-1", "1"),
            BoundaryMode::Ghost { ghosts: None, fit_degree: None },
            Precision::Double,
        );
        let r = run_experiment(&s).unwrap();
        assert!(r.rows.iter().all(|row| row.max_error <= 1e-11), "{}", r.to_csv());
    }

    #[test]
    fn sin_reconstruction_order() {
        let s = spec(Method::Reconstruct { m: 1 }, "sin", ("0", "2pi"), BoundaryMode::Supplied, Precision::Double);
        let r = run_experiment(&s).unwrap();
        assert!((r.final_order().unwrap() - 4.0).abs() < 0.25, "{}", r.to_csv());
        assert!(r.bound_dominates());
    }

    #[test]
    fn quasi_order_in_both_precisions() {
        for precision in [Precision::Double, Precision::Exact] {
            let s = spec(Method::Quasi { p: 3, q: 1 }, "exp", ("0", "1"), BoundaryMode::Supplied, precision);
            let r = run_experiment(&s).unwrap();
            assert!((r.final_order().unwrap() - 4.0).abs() < 0.3, "{}", r.to_csv());
            assert!(r.bound_dominates());
        }
    }

    #[test]
    fn csv_is_deterministic() {
        let s = spec(Method::Quasi { p: 2, q: 0 }, "sin", ("0", "1"), BoundaryMode::Supplied, Precision::Double);
        let a = run_experiment(&s).unwrap().to_csv();
        let b = run_experiment(&s).unwrap().to_csv();
        assert_eq!(a, b);
        assert!(a.contains("h,max_error,order,bound\n"));
    }

    #[test]
    fn invalid_specs() {
        let mut s = spec(Method::Quasi { p: 3, q: 1 }, "runge", ("0", "1"), BoundaryMode::Supplied, Precision::Exact);
        assert!(matches!(run_experiment(&s), Err(Error::Usage(_))));
        s.precision = Precision::Double;
        s.levels = 1;
        assert!(matches!(run_experiment(&s), Err(Error::Usage(_))));
    }
}
