//! Command-line front end. Exit codes: 0 success, 2 usage error, 1 runtime
//! error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::boundary::{self, MarginMode};
use crate::cell2point;
use crate::error::{Error, Result};
use crate::grid::GridField;
use crate::quasiinterp::{self, QuasiInterpolant};

use super::experiment::{self, BoundaryMode, Endpoint, ExperimentSpec, Method, Precision};
use super::field_io;

/// Largest `m` accepted by `coeffs recon`.
const MAX_COEFF_M: usize = 64;
/// Largest `i` accepted by `coeffs cfn`.
const MAX_CFN_I: usize = 256;

/// `auto` or a fixed count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Count {
    Auto,
    Fixed(usize),
}

impl Count {
    fn or(self, auto: usize) -> usize {
        match self {
            Count::Auto => auto,
            Count::Fixed(n) => n,
        }
    }

    fn option(self) -> Option<usize> {
        match self {
            Count::Auto => None,
            Count::Fixed(n) => Some(n),
        }
    }
}

fn parse_count(s: &str) -> std::result::Result<Count, String> {
    if s == "auto" {
        return Ok(Count::Auto);
    }
    s.parse().map(Count::Fixed).map_err(|_| format!("expected \"auto\" or a nonnegative integer, got {s:?}"))
}

#[derive(Parser, Debug)]
#[command(name = "cellavg", version, about = "Point values and spline quasi-interpolants from cell-average grid data")]
pub struct Cli {
    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Ghost samples per side for bounded data.
    #[arg(long, global = true, default_value = "auto", value_parser = parse_count)]
    ghosts: Count,

    /// Degree of the extrapolating polynomial for ghost samples.
    #[arg(long = "fit-degree", global = true, default_value = "auto", value_parser = parse_count)]
    fit_degree: Count,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print exact coefficient tables.
    Coeffs {
        #[command(subcommand)]
        kind: CoeffKind,
    },
    /// Turn a cell-average field (q = 1) into point values on the same grid.
    Reconstruct {
        input: PathBuf,
        /// Stencil half-width, one value or one per axis (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<usize>,
    },
    /// Build the quasi-interpolant of a q-average field and sample it as CSV.
    Quasi {
        input: PathBuf,
        /// Spline degree, one value or one per axis (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<usize>,
        /// Averaging order of the input data.
        #[arg(long)]
        q: u32,
        /// Equispaced samples per axis over the data nodes.
        #[arg(long, conflicts_with = "at")]
        samples: Option<usize>,
        /// Explicit sample point, comma-separated coordinates; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        at: Vec<String>,
    },
    /// Convergence study under repeated halving; CSV report.
    Converge {
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// sin, exp, runge, gauss or poly:c0,c1,...
        #[arg(long)]
        function: String,
        /// Interval per axis as a:b; endpoints may be rationals or multiples of pi.
        #[arg(long, required = true, allow_hyphen_values = true)]
        domain: Vec<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<u32>,
        #[arg(long, default_value_t = 5)]
        levels: usize,
        #[arg(long = "base-cells", default_value_t = 32)]
        base_cells: usize,
        #[arg(long, value_enum, default_value_t = BoundaryArg::Supplied)]
        boundary: BoundaryArg,
        #[arg(long, value_enum, default_value_t = PrecisionArg::Exact)]
        precision: PrecisionArg,
    },
}

#[derive(Subcommand, Debug)]
enum CoeffKind {
    /// a_1..a_m followed by the error coefficient.
    Recon {
        #[arg(long)]
        m: usize,
    },
    /// c_{p,0..} followed by the operator norm.
    Quasi {
        #[arg(long)]
        p: usize,
    },
    /// Central factorial number t(i, j).
    Cfn {
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Reconstruct,
    Quasi,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BoundaryArg {
    Ghost,
    Supplied,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PrecisionArg {
    Double,
    Exact,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Results go to `out` unless `--output` is given.
pub fn run(args: impl IntoIterator<Item = impl Into<OsString> + Clone>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let written = match &cli.output {
                Some(path) => fs::write(path, text).map_err(Error::from),
                None => out.write_all(text.as_bytes()).map_err(Error::from),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    1
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Usage(_) => 2,
                _ => 1,
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Coeffs { kind } => coeffs(kind),
        Command::Reconstruct { input, m } => {
            let field = field_io::read_field(input)?;
            let out = reconstruct(&field, m, cli.ghosts, cli.fit_degree)?;
            Ok(field_io::format_field(&out))
        }
        Command::Quasi { input, p, q, samples, at } => {
            let field = field_io::read_field(input)?;
            quasi(&field, p, *q, *samples, at, cli.ghosts, cli.fit_degree)
        }
        Command::Converge { mode, function, domain, m, p, q, levels, base_cells, boundary, precision } => {
            let method = match mode {
                ModeArg::Reconstruct => Method::Reconstruct {
                    m: m.ok_or_else(|| Error::Usage("--m is required for reconstruct".into()))?,
                },
                ModeArg::Quasi => Method::Quasi {
                    p: p.ok_or_else(|| Error::Usage("--p is required for quasi".into()))?,
                    q: q.ok_or_else(|| Error::Usage("--q is required for quasi".into()))?,
                },
            };
            let domain = domain
                .iter()
                .map(|d| {
                    let (a, b) = d
                        .split_once(':')
                        .ok_or_else(|| Error::Usage(format!("domain {d:?} is not of the form a:b")))?;
                    Ok((a.parse::<Endpoint>()?, b.parse::<Endpoint>()?))
                })
                .collect::<Result<Vec<_>>>()?;
            let spec = ExperimentSpec {
                method,
                function: function.parse()?,
                domain,
                levels: *levels,
                base_cells: *base_cells,
                boundary: match boundary {
                    BoundaryArg::Supplied => BoundaryMode::Supplied,
                    BoundaryArg::Ghost => BoundaryMode::Ghost {
                        ghosts: cli.ghosts.option(),
                        fit_degree: cli.fit_degree.option(),
                    },
                },
                precision: match precision {
                    PrecisionArg::Double => Precision::Double,
                    PrecisionArg::Exact => Precision::Exact,
                },
            };
            Ok(experiment::run_experiment(&spec)?.to_csv())
        }
    }
}

fn coeffs(kind: &CoeffKind) -> Result<String> {
    let mut out = String::new();
    match *kind {
        CoeffKind::Recon { m } => {
            if m == 0 || m > MAX_COEFF_M {
                return Err(Error::Usage(format!("--m must be in 1..={MAX_COEFF_M}")));
            }
            let c = cell2point::solve_coefficients(m);
            for a in &c.a()[1..] {
                let _ = writeln!(out, "{a}");
            }
            let _ = writeln!(out, "error {}", c.err_coeff());
        }
        CoeffKind::Quasi { p } => {
            if p == 0 || p > quasiinterp::MAX_ORDER {
                return Err(Error::Usage(format!("--p must be in 1..={}", quasiinterp::MAX_ORDER)));
            }
            let c = quasiinterp::quasi_coefficients(p)?;
            for v in c.c() {
                let _ = writeln!(out, "{v}");
            }
            let _ = writeln!(out, "norm {}", c.norm());
        }
        CoeffKind::Cfn { i, j } => {
            if i == 0 || i > MAX_CFN_I {
                return Err(Error::Usage(format!("--i must be in 1..={MAX_CFN_I}")));
            }
            let _ = writeln!(out, "{}", quasiinterp::central_factorial_t(i, j));
        }
    }
    Ok(out)
}

/// One value for every axis, or exactly one per axis.
fn per_axis(values: &[usize], k: usize, name: &str) -> Result<Vec<usize>> {
    match values.len() {
        1 => Ok(vec![values[0]; k]),
        n if n == k => Ok(values.to_vec()),
        n => Err(Error::Usage(format!("--{name} has {n} values for a {k}-dimensional field"))),
    }
}

/// Point values on the input grid. Each axis is padded with ghosts (default
/// `m`), reconstructed in valid mode, and any padding beyond `m` is cropped.
pub fn reconstruct(field: &GridField<f64>, m: &[usize], ghosts: Count, fit_degree: Count) -> Result<GridField<f64>> {
    let m = per_axis(m, field.k(), "m")?;
    if field.q() != 1 {
        return Err(Error::QMismatch { field: field.q(), expected: 1 });
    }
    let mut ext = field.clone();
    for (axis, &ma) in m.iter().enumerate() {
        ext = boundary::extend_axis(&ext, axis, ghosts.or(ma), fit_degree.or(2 * ma + 1))?;
    }
    let coeffs: Vec<_> = m.iter().map(|&ma| cell2point::solve_coefficients(ma)).collect();
    let mut out = cell2point::reconstruct_grid_valid(&ext, &coeffs)?;
    let mut origin = Vec::with_capacity(m.len());
    for (axis, &ma) in m.iter().enumerate() {
        let g = ghosts.or(ma);
        out = experiment::crop_axis(&out, axis, g.saturating_sub(ma))?;
        // recompute from the input so the geometry is reproduced exactly
        origin.push(field.coordinate(axis, ma.saturating_sub(g) as i64));
    }
    let shape = out.shape().to_vec();
    GridField::new(shape, field.h().to_vec(), origin, 0, out.into_data())
}

/// Builds the quasi-interpolant of `field` after ghost extension (default
/// margin from [`boundary::required_margin`], fit degree `p`).
pub fn build_quasi(
    field: &GridField<f64>,
    p: &[usize],
    q: u32,
    ghosts: Count,
    fit_degree: Count,
) -> Result<QuasiInterpolant<f64>> {
    let p = per_axis(p, field.k(), "p")?;
    if let Some(&bad) = p.iter().find(|&&pa| pa == 0 || pa + q as usize > quasiinterp::MAX_ORDER) {
        return Err(Error::Usage(format!("degree {bad} with q = {q} is out of range")));
    }
    if field.q() != q {
        return Err(Error::QMismatch { field: field.q(), expected: q });
    }
    let mut ext = field.clone();
    for (axis, &pa) in p.iter().enumerate() {
        let g = ghosts.or(boundary::required_margin(MarginMode::Quasi { p: pa, q: q as usize }));
        ext = boundary::extend_axis(&ext, axis, g, fit_degree.or(pa))?;
    }
    quasiinterp::build_quasi_interpolant_kd(&ext, &p, q)
}

#[allow(clippy::too_many_arguments)]
fn quasi(
    field: &GridField<f64>,
    p: &[usize],
    q: u32,
    samples: Option<usize>,
    at: &[String],
    ghosts: Count,
    fit_degree: Count,
) -> Result<String> {
    let interp = build_quasi(field, p, q, ghosts, fit_degree)?;
    let k = field.k();
    let points: Vec<Vec<f64>> = if at.is_empty() {
        sample_grid(field, &interp, samples)?
    } else {
        at.iter()
            .map(|s| {
                let x = s
                    .split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Usage(format!("bad coordinate in {s:?}"))))
                    .collect::<Result<Vec<f64>>>()?;
                if x.len() != k {
                    return Err(Error::Usage(format!("point {s:?} needs {k} coordinates")));
                }
                Ok(x)
            })
            .collect::<Result<_>>()?
    };
    let mut out = String::new();
    let header: Vec<String> = (1..=k).map(|l| format!("x{l}")).collect();
    let _ = writeln!(out, "{},value", header.join(","));
    for x in points {
        let v = interp.evaluate(&x)?;
        let coords: Vec<String> = x.iter().map(|c| format!("{c:?}")).collect();
        let _ = writeln!(out, "{},{v:?}", coords.join(","));
    }
    Ok(out)
}

/// Tensor grid of equispaced points over the data nodes, clipped to the
/// interpolant's valid box. Defaults to ten points per cell.
fn sample_grid(field: &GridField<f64>, interp: &QuasiInterpolant<f64>, samples: Option<usize>) -> Result<Vec<Vec<f64>>> {
    let boxes = interp.domain_box();
    let mut axes = Vec::with_capacity(field.k());
    for (l, (lo_box, hi_box)) in boxes.into_iter().enumerate() {
        let n = field.shape()[l];
        let lo = field.origin()[l].max(lo_box);
        let hi = field.coordinate(l, n as i64 - 1).min(hi_box);
        if lo > hi {
            return Err(Error::Usage(format!("axis {l}: no valid sample range; supply more ghosts")));
        }
        let count = samples.unwrap_or(10 * (n - 1) + 1);
        if count == 0 {
            return Err(Error::Usage("--samples must be positive".into()));
        }
        let pts: Vec<f64> = if count == 1 {
            vec![0.5 * (lo + hi)]
        } else {
            (0..count)
                .map(|i| if i + 1 == count { hi } else { lo + (hi - lo) * i as f64 / (count - 1) as f64 })
                .collect()
        };
        axes.push(pts);
    }
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let total: usize = shape.iter().product();
    let mut idx = vec![0usize; shape.len()];
    let mut out = Vec::with_capacity(total);
    for _ in 0..total {
        out.push(idx.iter().zip(&axes).map(|(&i, a)| a[i]).collect());
        crate::grid::increment(&mut idx, &shape);
    }
    Ok(out)
}
