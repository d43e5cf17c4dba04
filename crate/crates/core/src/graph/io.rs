//! Plain-text edge list: a header line `n_vertices m_edges`, then one
//! `u v w` line per edge in edge-id order.

use std::fmt::Write as _;
use std::path::Path;

use super::{Graph, GraphError};

impl Graph {
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n_vertices(), self.n_edges());
        for e in self.edges() {
            let _ = writeln!(out, "{} {} {}", e.u, e.v, e.weight);
        }
        out
    }
}

fn parse_fields<const N: usize>(line: &str, lineno: usize) -> Result<[u64; N], GraphError> {
    let mut out = [0u64; N];
    let mut fields = line.split_whitespace();
    for slot in out.iter_mut() {
        let tok = fields.next().ok_or_else(|| GraphError::Parse {
            line: lineno,
            message: format!("expected {N} fields"),
        })?;
        *slot = tok.parse().map_err(|_| GraphError::Parse {
            line: lineno,
            message: format!("`{tok}` is not a non-negative integer"),
        })?;
    }
    if fields.next().is_some() {
        return Err(GraphError::Parse { line: lineno, message: format!("expected {N} fields") });
    }
    Ok(out)
}

pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines
        .next()
        .ok_or(GraphError::Parse { line: 1, message: "missing header".into() })?;
    let [n, m] = parse_fields::<2>(header, hline)?;
    let mut edges = Vec::with_capacity(m as usize);
    for (lineno, line) in lines {
        let [u, v, w] = parse_fields::<3>(line, lineno)?;
        edges.push((u as usize, v as usize, w));
    }
    if edges.len() as u64 != m {
        return Err(GraphError::Parse {
            line: hline,
            message: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Graph::new(n as usize, edges)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    std::fs::write(path, g.to_edge_list())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_mismatch_is_rejected() {
        assert!(matches!(parse_edge_list("3 2\n0 1 1\n"), Err(GraphError::Parse { .. })));
        assert!(matches!(parse_edge_list("3 1\n0 x 1\n"), Err(GraphError::Parse { line: 2, .. })));
        assert!(matches!(parse_edge_list("3 1\n0 0 1\n"), Err(GraphError::SelfLoop { .. })));
    }

    proptest! {
        #[test]
        fn edge_list_round_trips(n in 2usize..10, raw in prop::collection::vec((0usize..10, 0usize..10, 1u64..9), 0..20)) {
            let edges: Vec<_> = raw.into_iter().filter(|(u, v, _)| u != v && *u < n && *v < n).collect();
            let g = Graph::new(n, edges).unwrap();
            let text = g.to_edge_list();
            let back = parse_edge_list(&text).unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(back.to_edge_list(), text);
        }
    }
}
