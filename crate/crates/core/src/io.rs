//! Line-oriented matrix text format.
//!
//! ```text
//! n m
//! dense
//! a11 a12 ... a1m
//! ...
//! ```
//!
//! or
//!
//! ```text
//! n m
//! sparse
//! row col value      (1-indexed)
//! ```
//!
//! Reals are written with 17 significant digits so that a write/read cycle
//! reproduces every `f64` bit for bit. Blank lines are ignored.

use crate::error::{Error, Result};
use crate::matrix::{SignalMatrix, SparseMatrix};
use std::fmt::Write as _;
use std::path::Path;

/// Formats a real with 17 significant digits.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_dense(a: &SignalMatrix) -> String {
    let mut out = format!("{} {}\ndense\n", a.n(), a.m());
    for r in 0..a.n() {
        for c in 0..a.m() {
            if c > 0 {
                out.push(' ');
            }
            out.push_str(&format_real(a.get(r, c)));
        }
        out.push('\n');
    }
    out
}

pub fn write_sparse(a: &SparseMatrix) -> String {
    let mut out = format!("{} {}\nsparse\n", a.n(), a.m());
    for &(r, c, v) in a.entries() {
        let _ = writeln!(out, "{} {} {}", r + 1, c + 1, format_real(v));
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_real(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("invalid real `{tok}`")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value `{tok}`")));
    }
    Ok(v)
}

fn parse_index(tok: &str, line: usize, bound: usize) -> Result<usize> {
    let i: usize = tok
        .parse()
        .map_err(|_| parse_err(line, format!("invalid index `{tok}`")))?;
    if i == 0 || i > bound {
        return Err(parse_err(line, format!("index {i} outside 1..={bound}")));
    }
    Ok(i - 1)
}

/// Parses either layout into a dense matrix.
pub fn parse_matrix(text: &str) -> Result<SignalMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(parse_err(hline, "header must be `n m`"));
    }
    let n: usize = dims[0].parse().map_err(|_| parse_err(hline, "invalid n"))?;
    let m: usize = dims[1].parse().map_err(|_| parse_err(hline, "invalid m"))?;
    if n == 0 || m == 0 {
        return Err(parse_err(hline, "dimensions must be positive"));
    }
    let mut a = SignalMatrix::zeros(n, m)?;

    let (kline, kind) = lines
        .next()
        .ok_or_else(|| parse_err(hline + 1, "missing layout keyword"))?;
    match kind {
        "dense" => {
            let mut rows = 0;
            for (line, l) in lines {
                if rows == n {
                    return Err(parse_err(line, "too many rows"));
                }
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() != m {
                    return Err(parse_err(
                        line,
                        format!("expected {m} values, found {}", toks.len()),
                    ));
                }
                for (c, tok) in toks.iter().enumerate() {
                    a.set(rows, c, parse_real(tok, line)?)?;
                }
                rows += 1;
            }
            if rows != n {
                return Err(parse_err(kline, format!("expected {n} rows, found {rows}")));
            }
        }
        "sparse" => {
            let mut seen = std::collections::HashSet::new();
            for (line, l) in lines {
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(parse_err(line, "expected `row col value`"));
                }
                let r = parse_index(toks[0], line, n)?;
                let c = parse_index(toks[1], line, m)?;
                if !seen.insert((r, c)) {
                    return Err(parse_err(
                        line,
                        format!("duplicate entry ({}, {})", r + 1, c + 1),
                    ));
                }
                a.set(r, c, parse_real(toks[2], line)?)?;
            }
        }
        other => return Err(parse_err(kline, format!("unknown layout `{other}`"))),
    }
    Ok(a)
}

pub fn read_matrix(path: &Path) -> Result<SignalMatrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn write_matrix(path: &Path, a: &SignalMatrix) -> Result<()> {
    std::fs::write(path, write_dense(a))?;
    Ok(())
}
