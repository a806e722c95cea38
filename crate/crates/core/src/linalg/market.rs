//! Matrix Market exchange: `coordinate real general` for sparse matrices and
//! `array real general` for vectors.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{CsrMatrix, TripletBuffer};

pub fn format_matrix<T: Real>(a: &CsrMatrix<T>) -> String {
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    out.push_str(&format!("{} {} {}\n", a.nrows(), a.ncols(), a.nnz()));
    for r in 0..a.nrows() {
        for (&c, &v) in a.row_indices(r).iter().zip(a.row_values(r)) {
            out.push_str(&format!("{} {} {:e}\n", r + 1, c + 1, v));
        }
    }
    out
}

pub fn format_vector<T: Real>(v: &[T]) -> String {
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix array real general\n");
    out.push_str(&format!("{} 1\n", v.len()));
    for x in v {
        out.push_str(&format!("{x:e}\n"));
    }
    out
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('%'))
}

fn parse<F: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<F> {
    tok.ok_or_else(|| Error::MatrixMarket(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::MatrixMarket(format!("malformed {what}")))
}

fn header(text: &str) -> Result<Vec<String>> {
    let first = text
        .lines()
        .next()
        .ok_or_else(|| Error::MatrixMarket("empty input".into()))?;
    let words: Vec<String> = first.split_whitespace().map(str::to_lowercase).collect();
    if words.len() < 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(Error::MatrixMarket("missing banner".into()));
    }
    if words[3] != "real" && words[3] != "integer" {
        return Err(Error::MatrixMarket(format!(
            "unsupported field {}",
            words[3]
        )));
    }
    Ok(words)
}

/// Parses a coordinate matrix; `symmetric` files are expanded to full storage.
pub fn parse_matrix<T: Real>(text: &str) -> Result<CsrMatrix<T>> {
    let words = header(text)?;
    if words[2] != "coordinate" {
        return Err(Error::MatrixMarket("expected coordinate format".into()));
    }
    let symmetric = match words[4].as_str() {
        "general" => false,
        "symmetric" => true,
        s => return Err(Error::MatrixMarket(format!("unsupported symmetry {s}"))),
    };
    let mut lines = data_lines(text);
    let size = lines
        .next()
        .ok_or_else(|| Error::MatrixMarket("missing size line".into()))?;
    let mut it = size.split_whitespace();
    let nrows: usize = parse(it.next(), "row count")?;
    let ncols: usize = parse(it.next(), "column count")?;
    let nnz: usize = parse(it.next(), "entry count")?;
    let mut t = TripletBuffer::with_capacity(nrows, ncols, nnz);
    let mut seen = 0;
    for line in lines {
        let mut it = line.split_whitespace();
        let r: usize = parse(it.next(), "row index")?;
        let c: usize = parse(it.next(), "column index")?;
        let v: f64 = parse(it.next(), "value")?;
        if r == 0 || c == 0 {
            return Err(Error::MatrixMarket("indices are one-based".into()));
        }
        t.push(r - 1, c - 1, T::lit(v));
        if symmetric && r != c {
            t.push(c - 1, r - 1, T::lit(v));
        }
        seen += 1;
    }
    if seen != nnz {
        return Err(Error::MatrixMarket(format!(
            "expected {nnz} entries, found {seen}"
        )));
    }
    t.compact()
}

pub fn parse_vector<T: Real>(text: &str) -> Result<Vec<T>> {
    let words = header(text)?;
    if words[2] != "array" {
        return Err(Error::MatrixMarket("expected array format".into()));
    }
    let mut lines = data_lines(text);
    let size = lines
        .next()
        .ok_or_else(|| Error::MatrixMarket("missing size line".into()))?;
    let mut it = size.split_whitespace();
    let n: usize = parse(it.next(), "row count")?;
    let cols: usize = parse(it.next(), "column count")?;
    if cols != 1 {
        return Err(Error::MatrixMarket("expected a single column".into()));
    }
    let v = lines
        .map(|l| parse::<f64>(Some(l), "value").map(T::lit))
        .collect::<Result<Vec<T>>>()?;
    if v.len() != n {
        return Err(Error::MatrixMarket(format!(
            "expected {n} values, found {}",
            v.len()
        )));
    }
    Ok(v)
}

pub fn write_matrix<T: Real>(path: impl AsRef<Path>, a: &CsrMatrix<T>) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(format_matrix(a).as_bytes())?;
    Ok(())
}

pub fn write_vector<T: Real>(path: impl AsRef<Path>, v: &[T]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(format_vector(v).as_bytes())?;
    Ok(())
}

pub fn read_matrix<T: Real>(path: impl AsRef<Path>) -> Result<CsrMatrix<T>> {
    parse_matrix(&fs::read_to_string(path)?)
}

pub fn read_vector<T: Real>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    parse_vector(&fs::read_to_string(path)?)
}
