//! Text formats: point clouds, edge lists, matrices and run artifacts.
//!
//! Every parser takes untrusted text and reports problems as
//! [`Error::Input`] with a line number; none of them panic.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::landscape::Embedding;
use crate::spectra::{EigenBasis, L1Entry};

/// Largest vertex index accepted from an edge list. Dense storage makes
/// anything beyond this unusable anyway.
pub const MAX_EDGE_VERTEX: usize = 1 << 16;

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        // keep the sign of negative zero out of the files
        return "0.0000000000000000e0".to_string();
    }
    format!("{v:.16e}")
}

fn parse_field(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .trim()
        .parse()
        .map_err(|_| Error::Input(format!("line {line}: cannot parse number {:?}", tok.trim())))?;
    if !v.is_finite() {
        return Err(Error::Input(format!("line {line}: non-finite value {:?}", tok.trim())));
    }
    Ok(v)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// One point per line, coordinates separated by `delimiter`, no header.
pub fn parse_point_cloud(text: &str, delimiter: char) -> Result<Vec<Vec<f64>>> {
    let mut points: Vec<Vec<f64>> = Vec::new();
    for (line, l) in content_lines(text) {
        let row = l
            .split(delimiter)
            .map(|tok| parse_field(tok, line))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = points.first() {
            if first.len() != row.len() {
                return Err(Error::Input(format!(
                    "line {line}: {} coordinates, expected {}",
                    row.len(),
                    first.len()
                )));
            }
        }
        points.push(row);
    }
    if points.is_empty() {
        return Err(Error::Input("point cloud has no points".into()));
    }
    Ok(points)
}

/// Edges with vertex count max index + 1.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub vertices: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

/// Lines `i j [w]`, 0-indexed, whitespace separated, default weight 1.
pub fn parse_edge_list(text: &str) -> Result<EdgeList> {
    let mut edges = Vec::new();
    let mut vertices = 0;
    for (line, l) in content_lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 2 || toks.len() > 3 {
            return Err(Error::Input(format!("line {line}: expected `i j [w]`")));
        }
        let idx = |t: &str| -> Result<usize> {
            let v: usize = t
                .parse()
                .map_err(|_| Error::Input(format!("line {line}: bad vertex index {t:?}")))?;
            if v >= MAX_EDGE_VERTEX {
                return Err(Error::Input(format!("line {line}: vertex {v} exceeds {MAX_EDGE_VERTEX}")));
            }
            Ok(v)
        };
        let (i, j) = (idx(toks[0])?, idx(toks[1])?);
        let w = match toks.get(2) {
            Some(t) => parse_field(t, line)?,
            None => 1.0,
        };
        if w < 0.0 {
            return Err(Error::Input(format!("line {line}: negative weight")));
        }
        vertices = vertices.max(i + 1).max(j + 1);
        edges.push((i, j, w));
    }
    if edges.is_empty() {
        return Err(Error::Input("edge list has no edges".into()));
    }
    Ok(EdgeList { vertices, edges })
}

/// Row-major CSV, no header.
pub fn matrix_to_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::with_capacity(m.nrows() * m.ncols() * 25);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&fmt_f64(m[(i, j)]));
        }
        out.push('\n');
    }
    out
}

pub fn parse_matrix_csv(text: &str) -> Result<DMatrix<f64>> {
    let rows = parse_point_cloud(text, ',').map_err(|e| match e {
        Error::Input(msg) => Error::Input(format!("matrix csv: {msg}")),
        other => other,
    })?;
    let (r, c) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

fn header(out: &mut String, fixed: &[&str], labels: &[String], tail: impl Iterator<Item = String>) {
    let mut cols: Vec<String> = fixed.iter().map(|s| s.to_string()).collect();
    cols.extend(labels.iter().cloned());
    cols.extend(tail);
    out.push_str(&cols.join(","));
    out.push('\n');
}

/// `index,eigenvalue,<labels>,s0..s{n-1}` with one row per function in
/// `subset`. Complex bases export their real parts.
pub fn basis_to_csv(basis: &EigenBasis, subset: &[usize]) -> String {
    let n = basis.grid_len();
    let mut out = String::new();
    header(&mut out, &["index", "eigenvalue"], basis.label_names(), (0..n).map(|i| format!("s{i}")));
    for &k in subset {
        let _ = write!(out, "{k},{}", fmt_f64(basis.eigenvalues()[k]));
        if let Some(l) = basis.labels().get(k) {
            for v in l {
                let _ = write!(out, ",{v}");
            }
        }
        for x in 0..n {
            out.push(',');
            out.push_str(&fmt_f64(basis.vectors()[(x, k)]));
        }
        out.push('\n');
    }
    out
}

fn coord_name(c: usize) -> String {
    match c {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        _ => format!("c{}", c + 1),
    }
}

/// `index,eigenvalue,<labels>,x,y,z[,c4..]`, one row per embedded point.
pub fn embedding_to_csv(e: &Embedding, basis: &EigenBasis, subset: &[usize]) -> String {
    let mut out = String::new();
    header(&mut out, &["index", "eigenvalue"], basis.label_names(), (0..e.dim()).map(coord_name));
    for (row, &k) in subset.iter().enumerate() {
        let _ = write!(out, "{k},{}", fmt_f64(basis.eigenvalues()[k]));
        if let Some(l) = basis.labels().get(k) {
            for v in l {
                let _ = write!(out, ",{v}");
            }
        }
        for c in 0..e.dim() {
            out.push(',');
            out.push_str(&fmt_f64(e.coords()[(row, c)]));
        }
        out.push('\n');
    }
    out
}

pub fn l1_profile_to_csv(profile: &[L1Entry]) -> String {
    let mut out = String::from("index,eigenvalue,l1\n");
    for p in profile {
        let _ = writeln!(out, "{},{},{}", p.index, fmt_f64(p.eigenvalue), fmt_f64(p.l1));
    }
    out
}

pub fn vector_to_csv(v: &[f64]) -> String {
    let mut out = String::from("index,value\n");
    for (i, x) in v.iter().enumerate() {
        let _ = writeln!(out, "{i},{}", fmt_f64(*x));
    }
    out
}

/// A headed numeric table as written by the exporters above.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }
}

/// Header line followed by rows of numbers, all the same width.
pub fn parse_table(text: &str) -> Result<Table> {
    let mut lines = content_lines(text);
    let (_, head) = lines.next().ok_or_else(|| Error::Input("table is empty".into()))?;
    let columns: Vec<String> = head.split(',').map(|s| s.trim().to_string()).collect();
    if columns.iter().any(|c| c.is_empty()) {
        return Err(Error::Input("line 1: empty column name".into()));
    }
    let mut rows = Vec::new();
    for (line, l) in lines {
        let row = l.split(',').map(|t| parse_field(t, line)).collect::<Result<Vec<_>>>()?;
        if row.len() != columns.len() {
            return Err(Error::Input(format!(
                "line {line}: {} fields, header has {}",
                row.len(),
                columns.len()
            )));
        }
        rows.push(row);
    }
    Ok(Table { columns, rows })
}

/// Flat `key=value` lines; `#` starts a comment line. Later keys win.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (line, l) in content_lines(text) {
        let (k, v) = l
            .split_once('=')
            .ok_or_else(|| Error::Input(format!("line {line}: expected key=value")))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Input(format!("line {line}: empty key")));
        }
        let v = v.trim().to_string();
        match out.iter_mut().find(|(key, _)| key == k) {
            Some(slot) => slot.1 = v,
            None => out.push((k.to_string(), v)),
        }
    }
    Ok(out)
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_cloud_delimiters() {
        let pts = parse_point_cloud("1,2\n3,4.5\n\n", ',').unwrap();
        assert_eq!(pts, vec![vec![1.0, 2.0], vec![3.0, 4.5]]);
        let pts = parse_point_cloud("1;2;3\n", ';').unwrap();
        assert_eq!(pts[0].len(), 3);
        let pts = parse_point_cloud("1\t2\n", '\t').unwrap();
        assert_eq!(pts[0], vec![1.0, 2.0]);
        assert!(parse_point_cloud("1,2\n3\n", ',').is_err());
        assert!(parse_point_cloud("1,x\n", ',').is_err());
        assert!(parse_point_cloud("1,inf\n", ',').is_err());
        assert!(parse_point_cloud("", ',').is_err());
    }

    #[test]
    fn edge_lists() {
        let e = parse_edge_list("0 1\n1 2 0.5\n# comment\n").unwrap();
        assert_eq!(e.vertices, 3);
        assert_eq!(e.edges, vec![(0, 1, 1.0), (1, 2, 0.5)]);
        assert!(parse_edge_list("0\n").is_err());
        assert!(parse_edge_list("0 1 2 3\n").is_err());
        assert!(parse_edge_list("0 -1\n").is_err());
        assert!(parse_edge_list("0 1 -2\n").is_err());
        assert!(parse_edge_list("0 99999999\n").is_err());
    }

    #[test]
    fn numbers_round_trip() {
        for v in [std::f64::consts::PI, -1e-300, 1.0 / 3.0, 0.0, -0.0, 6.02e23] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64((-1.0f64).exp()), "3.6787944117144233e-1");
    }

    #[test]
    fn matrix_round_trip() {
        let m = DMatrix::from_fn(3, 4, |i, j| (i as f64 + 1.0) / (j as f64 + 7.0));
        assert_eq!(parse_matrix_csv(&matrix_to_csv(&m)).unwrap(), m);
    }

    #[test]
    fn tables_and_key_values() {
        let t = parse_table("index,value\n0,1.5\n1,2\n").unwrap();
        assert_eq!(t.column("value").unwrap(), vec![1.5, 2.0]);
        assert!(parse_table("a,b\n1\n").is_err());
        assert!(parse_table("").is_err());

        let kv = parse_key_values("a = 1\n# x\nb=two\na=3\n").unwrap();
        assert_eq!(kv, vec![("a".into(), "3".into()), ("b".into(), "two".into())]);
        assert!(parse_key_values("novalue\n").is_err());
        assert!(parse_key_values("=3\n").is_err());
    }
}
