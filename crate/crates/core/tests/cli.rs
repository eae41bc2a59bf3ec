use std::path::{Path, PathBuf};
use std::process::Command;

use cellavg::bspline::q_average_polynomial_at;
use cellavg::cell2point::{solve_coefficients, tensor_stencil};
use cellavg::grid::{apply_tensor_direct, GridField};
use cellavg::harness::cli::run;
use cellavg::harness::field_io::{read_field, write_field};
use cellavg::harness::TestFunction;
use cellavg::Rational;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cellavg(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["cellavg"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn save(dir: &TempDir, name: &str, field: &GridField<f64>) -> PathBuf {
    let path = dir.path().join(name);
    write_field(field, &path).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Exact q-averages of a polynomial at `origin + i h`, rounded to double.
fn poly_field(coeffs: &[Rational], q: u32, n: usize, h: Rational, origin: Rational) -> GridField<f64> {
    let data = (0..n)
        .map(|i| {
            let c = &origin + &(&h * &Rational::from_integer(i as i64));
            q_average_polynomial_at(coeffs, q, &h, &c).unwrap().to_f64()
        })
        .collect();
    GridField::new(vec![n], vec![h.to_f64()], vec![origin.to_f64()], q, data).unwrap()
}

#[test]
fn coefficient_tables() {
    let recon = cellavg(&["coeffs", "recon", "--m", "5"]);
    assert_eq!(recon.code, 0);
    let lines: Vec<&str> = recon.stdout.lines().collect();
    assert_eq!(&lines[..5], ["-1/24", "3/640", "-5/7168", "35/294912", "-63/2883584"]);
    assert!(lines[5].starts_with("error "));

    let quasi = cellavg(&["coeffs", "quasi", "--p", "4"]);
    assert_eq!(quasi.stdout, "319/192\n-107/288\n47/1152\nnorm 179/72\n");
    assert_eq!(cellavg(&["coeffs", "cfn", "--i", "4", "--j", "4"]).stdout, "1\n");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["coeffs", "recon", "--m", "0"][..],
        &["coeffs", "quasi", "--p", "99"],
        &["coeffs", "cfn", "--i", "0", "--j", "0"],
        &["frobnicate"],
        &["coeffs", "recon"],
        &["--ghosts", "many", "coeffs", "recon", "--m", "1"],
        &["converge", "--mode", "quasi", "--function", "cosh", "--domain", "0:1", "--p", "3", "--q", "1"],
        &["converge", "--mode", "reconstruct", "--function", "sin", "--domain", "0:1", "--m", "1", "--levels", "1"],
    ] {
        let r = cellavg(args);
        assert_eq!(r.code, 2, "{args:?}: {}", r.stderr);
        assert!(!r.stderr.is_empty());
    }
    assert_eq!(cellavg(&["--help"]).code, 0);
}

#[test]
fn reconstruct_constant_and_quadratic() {
    let dir = TempDir::new().unwrap();
    let constant = GridField::uniform(vec![6], 0.3, vec![0.15], 1, vec![2.5; 6]).unwrap();
    let input = save(&dir, "const.txt", &constant);
    let output = dir.path().join("out.txt");
    let r = cellavg(&["reconstruct", s(&input), "--m", "2", "--output", s(&output)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.is_empty());
    let out = read_field(&output).unwrap();
    assert_eq!(out.shape(), constant.shape());
    assert_eq!(out.origin(), constant.origin());
    assert_eq!(out.q(), 0);
    assert!(out.data().iter().all(|v| (v - 2.5).abs() < 1e-14));

    // exact cell averages of x² on cells of width 1/8 centred at i/8
    let sq = [Rational::zero(), Rational::zero(), Rational::one()];
    let field = poly_field(&sq, 1, 12, Rational::frac(1, 8), Rational::frac(-3, 4));
    let input = save(&dir, "sq.txt", &field);
    let r = cellavg(&["reconstruct", s(&input), "--m", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let out = cellavg::harness::field_io::parse_field(&r.stdout).unwrap();
    for i in 0..12 {
        let x = field.coordinate(0, i);
        assert!((out.data()[i as usize] - x * x).abs() < 1e-12);
    }
}

#[test]
fn reconstruct_3d_matches_direct_stencil() {
    let dir = TempDir::new().unwrap();
    let field = GridField::from_fn(vec![5, 6, 7], vec![0.1, 0.2, 0.15], vec![0.0, 0.5, -1.0], 1, |x| {
        (x[0] * 3.0).sin() * (1.0 + x[1] * x[2]) + x[2].exp()
    })
    .unwrap();
    let input = save(&dir, "f3.txt", &field);
    let r = cellavg(&["reconstruct", s(&input), "--m", "1,1,1", "--ghosts", "0"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let out = cellavg::harness::field_io::parse_field(&r.stdout).unwrap();
    let c = solve_coefficients(1);
    let (shape, weights) = tensor_stencil(&[c.clone(), c.clone(), c]);
    assert_eq!(weights[0], Rational::frac(-1, 13824));
    assert_eq!(weights[13], Rational::frac(13, 12).pow(3));
    let w: Vec<f64> = weights.iter().map(Rational::to_f64).collect();
    let direct = apply_tensor_direct(&field, &shape, &w).unwrap();
    assert_eq!(out.shape(), direct.shape());
    for (a, b) in out.data().iter().zip(direct.data()) {
        assert!((a - b).abs() < 1e-13);
    }
}

#[test]
fn quasi_samples() {
    let dir = TempDir::new().unwrap();
    let constant = GridField::uniform(vec![10], 0.5, vec![0.0], 2, vec![-1.25; 10]).unwrap();
    let input = save(&dir, "c.txt", &constant);
    let r = cellavg(&["quasi", s(&input), "--p", "2", "--q", "2", "--samples", "7"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut lines = r.stdout.lines();
    assert_eq!(lines.next(), Some("x1,value"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 7);
    for row in rows {
        let v: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((v + 1.25).abs() < 1e-13);
    }

    let cubic: Vec<Rational> = ["1/3", "-2", "1/2", "3/4"].iter().map(|c| c.parse().unwrap()).collect();
    let field = poly_field(&cubic, 1, 16, Rational::frac(1, 10), Rational::frac(-4, 5));
    let input = save(&dir, "cubic.txt", &field);
    let r = cellavg(&["quasi", s(&input), "--p", "3", "--q", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows: Vec<(f64, f64)> = r
        .stdout
        .lines()
        .skip(1)
        .map(|l| {
            let (x, v) = l.split_once(',').unwrap();
            (x.parse().unwrap(), v.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 151);
    for (x, v) in rows {
        let exact = cellavg::poly::eval(&cubic, &x);
        assert!((v - exact).abs() < 1e-10, "x={x}: {v} vs {exact}");
    }

    let r = cellavg(&["quasi", s(&input), "--p", "3", "--q", "1", "--at", "-0.5", "--at", "0.25"]);
    assert_eq!(r.stdout.lines().count(), 3);
}

#[test]
fn quasi_q_mismatch_and_bad_files() {
    let dir = TempDir::new().unwrap();
    let field = GridField::uniform(vec![12], 0.5, vec![0.0], 1, vec![1.0; 12]).unwrap();
    let input = save(&dir, "q1.txt", &field);
    let r = cellavg(&["quasi", s(&input), "--p", "3", "--q", "2"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("q mismatch"), "{}", r.stderr);

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "# cellfield v1\ndims: 1\nshape: 3\nh: 0.5\norigin: 0\nq: 1\ndata:\n1 2\n").unwrap();
    let r = cellavg(&["reconstruct", s(&bad), "--m", "1"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("line 8"), "{}", r.stderr);
    let r = cellavg(&["reconstruct", s(&dir.path().join("missing.txt")), "--m", "1"]);
    assert_eq!(r.code, 1);
    let r = cellavg(&["reconstruct", s(&input), "--m", "1,1"]);
    assert_eq!(r.code, 2);
}

#[test]
fn quasi_sin_refinement_ratio() {
    let dir = TempDir::new().unwrap();
    let sin = TestFunction::Sin;
    let mut errors = Vec::new();
    for cells in [40usize, 80] {
        let h = 1.0 / cells as f64;
        let data: Vec<f64> = (0..cells).map(|i| sin.q_average_f64(1, h, (i as f64 + 0.5) * h).unwrap()).collect();
        let field = GridField::new(vec![cells], vec![h], vec![0.5 * h], 1, data).unwrap();
        let input = save(&dir, &format!("sin{cells}.txt"), &field);
        let r = cellavg(&["quasi", s(&input), "--p", "3", "--q", "1", "--samples", "401"]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let worst = r
            .stdout
            .lines()
            .skip(1)
            .map(|l| {
                let (x, v) = l.split_once(',').unwrap();
                let x: f64 = x.parse().unwrap();
                (v.parse::<f64>().unwrap() - x.sin()).abs()
            })
            .fold(0.0f64, f64::max);
        errors.push(worst);
    }
    let ratio = errors[0] / errors[1];
    assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn converge_reports() {
    let args = ["converge", "--mode", "reconstruct", "--function", "sin", "--domain", "0:2pi", "--m", "1"];
    let a = cellavg(&args);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, cellavg(&args).stdout);
    let rows: Vec<Vec<&str>> = a
        .stdout
        .lines()
        .skip_while(|l| l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 5);
    let order: f64 = rows[4][2].parse().unwrap();
    assert!((3.75..=4.25).contains(&order));

    let q = cellavg(&["converge", "--mode", "quasi", "--function", "exp", "--domain", "0:1", "--p", "3", "--q", "1", "--precision", "double"]);
    let last = q.stdout.lines().last().unwrap();
    let order: f64 = last.split(',').nth(2).unwrap().parse().unwrap();
    assert!((3.75..=4.25).contains(&order), "{}", q.stdout);

    let cubic = cellavg(&[
        "converge", "--mode", "reconstruct", "--function", "poly:0.5,-1,2,1", "--domain", "-1:1", "--m", "1",
        "--boundary", "ghost", "--precision", "double",
    ]);
    assert_eq!(cubic.code, 0, "{}", cubic.stderr);
    for line in cubic.stdout.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let err: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(err <= 1e-11, "{line}");
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_cellavg");
    let ok = Command::new(bin).args(["coeffs", "quasi", "--p", "3"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "4/3\n-1/6\nnorm 5/3\n");
    let usage = Command::new(bin).args(["coeffs", "recon", "--m", "-3"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    let runtime = Command::new(bin).args(["reconstruct", "/nonexistent/field.txt", "--m", "1"]).output().unwrap();
    assert_eq!(runtime.status.code(), Some(1));
}
