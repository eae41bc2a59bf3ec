//! Text format for grid fields.
//!
//! ```text
//! # cellfield v1
//! dims: 2
//! shape: 3 4
//! h: 0.5 0.25
//! origin: 0 0
//! q: 1
//! data:
//! <row-major values>
//! ```
//!
//! Floats are written in the shortest form that parses back to the same
//! double, so a write/read cycle is bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::GridField;

pub const MAGIC: &str = "# cellfield v1";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_float(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("not a number: {tok:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value {tok:?}")));
    }
    Ok(v)
}

fn parse_list<V>(rest: &str, line: usize, f: impl Fn(&str, usize) -> Result<V>) -> Result<Vec<V>> {
    rest.split_whitespace().map(|t| f(t, line)).collect()
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("not a nonnegative integer: {tok:?}")))
}

#[derive(Default)]
struct Header {
    dims: Option<usize>,
    shape: Option<Vec<usize>>,
    h: Option<Vec<f64>>,
    origin: Option<Vec<f64>>,
    q: Option<u32>,
}

fn set_once<V>(slot: &mut Option<V>, value: V, key: &str, line: usize) -> Result<()> {
    if slot.is_some() {
        return Err(parse_err(line, format!("duplicate key {key:?}")));
    }
    *slot = Some(value);
    Ok(())
}

/// Parses the text of a field file.
pub fn parse_field(text: &str) -> Result<GridField<f64>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l.trim() == MAGIC => {}
        _ => return Err(parse_err(1, format!("expected {MAGIC:?}"))),
    }
    let mut hdr = Header::default();
    let mut data_line = None;
    for (no, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| parse_err(no, format!("expected \"key: value\", got {line:?}")))?;
        match key.trim() {
            "dims" => {
                let v = parse_list(rest, no, parse_usize)?;
                if v.len() != 1 {
                    return Err(parse_err(no, "dims takes one value"));
                }
                set_once(&mut hdr.dims, v[0], "dims", no)?;
            }
            "shape" => set_once(&mut hdr.shape, parse_list(rest, no, parse_usize)?, "shape", no)?,
            "h" => set_once(&mut hdr.h, parse_list(rest, no, parse_float)?, "h", no)?,
            "origin" => set_once(&mut hdr.origin, parse_list(rest, no, parse_float)?, "origin", no)?,
            "q" => {
                let v = parse_list(rest, no, parse_usize)?;
                if v.len() != 1 {
                    return Err(parse_err(no, "q takes one value"));
                }
                let q = u32::try_from(v[0]).map_err(|_| parse_err(no, "q out of range"))?;
                set_once(&mut hdr.q, q, "q", no)?;
            }
            "data" => {
                if !rest.trim().is_empty() {
                    return Err(parse_err(no, "values must start on the line after \"data:\""));
                }
                data_line = Some(no);
                break;
            }
            other => return Err(parse_err(no, format!("unknown header key {other:?}"))),
        }
    }
    let data_no = data_line.ok_or_else(|| parse_err(text.lines().count().max(1), "missing \"data:\" line"))?;
    let missing = |key: &str| parse_err(data_no, format!("missing header key {key:?}"));
    let dims = hdr.dims.ok_or_else(|| missing("dims"))?;
    let shape = hdr.shape.ok_or_else(|| missing("shape"))?;
    let h = hdr.h.ok_or_else(|| missing("h"))?;
    let origin = hdr.origin.ok_or_else(|| missing("origin"))?;
    let q = hdr.q.ok_or_else(|| missing("q"))?;
    for (key, len) in [("shape", shape.len()), ("h", h.len()), ("origin", origin.len())] {
        if len != dims {
            return Err(parse_err(data_no, format!("{key} has {len} entries but dims is {dims}")));
        }
    }
    let expected: usize = shape.iter().product();
    let mut data = Vec::with_capacity(expected);
    let mut last = data_no;
    for (no, raw) in lines {
        for tok in raw.split_whitespace() {
            if data.len() == expected {
                return Err(parse_err(no, format!("more than {expected} values")));
            }
            data.push(parse_float(tok, no)?);
        }
        last = no;
    }
    if data.len() != expected {
        return Err(parse_err(last, format!("expected {expected} values, found {}", data.len())));
    }
    GridField::new(shape, h, origin, q, data).map_err(|e| parse_err(data_no, e.to_string()))
}

/// Renders a field; each line of the last axis goes on its own text line.
pub fn format_field(field: &GridField<f64>) -> String {
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    let _ = writeln!(out, "dims: {}", field.k());
    let shape: Vec<String> = field.shape().iter().map(usize::to_string).collect();
    let _ = writeln!(out, "shape: {}", shape.join(" "));
    let _ = writeln!(out, "h: {}", join(field.h()));
    let _ = writeln!(out, "origin: {}", join(field.origin()));
    let _ = writeln!(out, "q: {}", field.q());
    out.push_str("data:\n");
    let row = *field.shape().last().expect("k >= 1");
    for chunk in field.data().chunks(row) {
        out.push_str(&join(chunk));
        out.push('\n');
    }
    out
}

pub fn read_field(path: impl AsRef<Path>) -> Result<GridField<f64>> {
    parse_field(&fs::read_to_string(path)?)
}

pub fn write_field(field: &GridField<f64>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_field(field))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let f = parse_field("# cellfield v1\ndims: 1\nshape: 3\nh: 0.5\norigin: 0\nq: 1\ndata:\n1 2 3\n").unwrap();
        assert_eq!(f.shape(), &[3]);
        assert_eq!(f.q(), 1);
        assert_eq!(f.data(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_bad_input_with_line_numbers() {
        let cases = [
            ("dims: 1\n", 1),
            ("# cellfield v1\ndims: 1\nshape: 3\nh: 0.5\norigin: 0\nq: 1\ncolor: red\ndata:\n1 2 3\n", 7),
            ("# cellfield v1\ndims: 1\nshape: 3\nh: 0.5\norigin: 0\nq: 1\ndata:\n1 2\n", 8),
            ("# cellfield v1\ndims: 1\nshape: 3\nh: 0.5\norigin: 0\nq: 1\ndata:\n1\nNaN 3\n", 9),
            ("# cellfield v1\ndims: 1\nshape: 3\nh: 0.5\nh: 0.5\norigin: 0\nq: 1\ndata:\n1 2 3\n", 5),
            ("# cellfield v1\ndims: 2\nshape: 3\nh: 0.5\norigin: 0\nq: 1\ndata:\n1 2 3\n", 7),
        ];
        for (text, line) in cases {
            match parse_field(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn round_trip_awkward_values() {
        let data = vec![0.1, -1e-300, 5e-324, 1.0 / 3.0, 2.5e17, -0.0];
        let f = GridField::new(vec![2, 3], vec![0.1, 1e-3], vec![-0.05, 7.0], 2, data).unwrap();
        let back = parse_field(&format_field(&f)).unwrap();
        assert_eq!(back.shape(), f.shape());
        assert_eq!(back.q(), 2);
        for (a, b) in back.data().iter().zip(f.data()).chain(back.h().iter().zip(f.h())) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
