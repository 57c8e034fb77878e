//! Text formats for graphs and labels.
//!
//! Edge list: a header `n <count>` followed by one `i<TAB>j` pair per line,
//! 0-indexed. Label file: one integer per line.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, LabelVector};

pub fn format_edge_list(a: &AdjacencyMatrix) -> String {
    let mut out = format!("n {}\n", a.n());
    for (i, j) in a.edges() {
        writeln!(out, "{i}\t{j}").expect("writing to a String");
    }
    out
}

fn parse_index(token: &str, line: usize) -> Result<usize> {
    token
        .parse()
        .map_err(|_| Error::Parse { line, msg: format!("expected a node index, found {token:?}") })
}

pub fn parse_edge_list(text: &str) -> Result<AdjacencyMatrix> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    let mut parts = header.split_whitespace();
    let n = match (parts.next(), parts.next(), parts.next()) {
        (Some("n"), Some(count), None) => parse_index(count, 1)?,
        _ => return Err(Error::Parse { line: 1, msg: format!("expected `n <count>`, found {header:?}") }),
    };
    let mut edges = Vec::new();
    for (idx, line) in lines {
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(i), Some(j), None) => edges.push((parse_index(i, idx + 1)?, parse_index(j, idx + 1)?)),
            _ => return Err(Error::Parse { line: idx + 1, msg: format!("expected `i<TAB>j`, found {line:?}") }),
        }
    }
    AdjacencyMatrix::from_edge_list(n, &edges)
}

pub fn format_labels(z: &LabelVector) -> String {
    let mut out = String::with_capacity(3 * z.len());
    for l in z.labels() {
        writeln!(out, "{l}").expect("writing to a String");
    }
    out
}

/// Parses one label per line; `k` defaults to the largest label present.
pub fn parse_labels(text: &str, k: Option<usize>) -> Result<LabelVector> {
    let labels = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(idx, l)| {
            l.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse { line: idx + 1, msg: format!("expected a label, found {l:?}") })
        })
        .collect::<Result<Vec<_>>>()?;
    match k {
        Some(k) => LabelVector::new(labels, k),
        None => Ok(LabelVector::from_labels(labels)),
    }
}

pub fn read_edge_list(path: &Path) -> Result<AdjacencyMatrix> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

pub fn write_edge_list(path: &Path, a: &AdjacencyMatrix) -> Result<()> {
    Ok(std::fs::write(path, format_edge_list(a))?)
}

pub fn read_labels(path: &Path, k: Option<usize>) -> Result<LabelVector> {
    parse_labels(&std::fs::read_to_string(path)?, k)
}

pub fn write_labels(path: &Path, z: &LabelVector) -> Result<()> {
    Ok(std::fs::write(path, format_labels(z))?)
}

/// One positive real per line.
pub fn parse_reals(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(idx, l)| {
            l.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse { line: idx + 1, msg: format!("expected a number, found {l:?}") })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_round_trip() {
        let a = AdjacencyMatrix::from_edge_list(5, &[(0, 3), (1, 2), (4, 0)]).unwrap();
        let text = format_edge_list(&a);
        assert_eq!(text, "n 5\n0\t3\n0\t4\n1\t2\n");
        assert_eq!(parse_edge_list(&text).unwrap(), a);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_edge_list("m 3\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("n 3\n0\tx\n"), Err(Error::Parse { line: 2, .. })));
        assert_eq!(parse_edge_list("n 3\n0\t0\n"), Err(Error::SelfLoop(0)));
        assert!(matches!(parse_labels("1\n2\nz\n", None), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn labels_round_trip() {
        let z = LabelVector::new(vec![1, 0, 2, 2], 2).unwrap();
        assert_eq!(parse_labels(&format_labels(&z), Some(2)).unwrap(), z);
    }
}
