//! Small named graph families used in tests, examples and the corpus.

use super::Graph;

/// Cycle `C_n` (n >= 3).
pub fn cycle(n: usize) -> Graph {
    let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_pairs(n, &pairs).expect("cycle")
}

/// Path on `n` vertices.
pub fn path(n: usize) -> Graph {
    let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_pairs(n, &pairs).expect("path")
}

/// Complete graph `K_n`.
pub fn complete(n: usize) -> Graph {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    Graph::from_pairs(n, &pairs).expect("complete graph")
}

/// `K_4` with the edge `(2, 3)` removed.
pub fn k4_minus_edge() -> Graph {
    Graph::from_pairs(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).expect("K4 - e")
}

/// The Petersen graph: outer 5-cycle, inner pentagram, five spokes.
pub fn petersen() -> Graph {
    let mut pairs = Vec::new();
    for i in 0..5 {
        pairs.push((i, (i + 1) % 5));
        pairs.push((5 + i, 5 + (i + 2) % 5));
        pairs.push((i, 5 + i));
    }
    Graph::from_pairs(10, &pairs).expect("petersen")
}

/// Rectangular grid graph, vertex `(r, c)` at index `r * cols + c`.
pub fn grid(rows: usize, cols: usize) -> Graph {
    let mut pairs = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                pairs.push((v, v + 1));
            }
            if r + 1 < rows {
                pairs.push((v, v + cols));
            }
        }
    }
    Graph::from_pairs(rows * cols, &pairs).expect("grid")
}

/// Two vertex-disjoint copies of `g`.
pub fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
    let shift = a.n_vertices();
    let edges = a
        .edges()
        .iter()
        .map(|e| (e.u, e.v, e.weight))
        .chain(b.edges().iter().map(|e| (e.u + shift, e.v + shift, e.weight)));
    Graph::new(shift + b.n_vertices(), edges.collect::<Vec<_>>()).expect("disjoint union")
}
