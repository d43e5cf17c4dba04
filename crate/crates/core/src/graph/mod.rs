//! Undirected multigraphs with positive integer edge weights.
//!
//! A [`Graph`] is immutable once built. Vertex ids are `0..n_vertices` and
//! edge ids follow construction order, so arc ids and every matrix derived
//! from a graph are reproducible.

mod io;
pub mod named;
mod structure;

pub use io::{parse_edge_list, read_edge_list, write_edge_list};
pub use structure::{bridges, components, min_cut_exhaustive, min_cut_stoer_wagner, structure_report, StructureReport};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("edge {edge} is a self-loop on vertex {vertex}")]
    SelfLoop { edge: usize, vertex: usize },
    #[error("edge {edge} references vertex {vertex}, but the graph has {n} vertices")]
    VertexOutOfRange { edge: usize, vertex: usize, n: usize },
    #[error("edge {edge} has zero weight")]
    ZeroWeight { edge: usize },
    #[error("graph has no vertices")]
    Empty,
    #[error("edge list line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: u64,
}

impl Edge {
    /// The endpoint opposite to `x`.
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }
}

/// One entry of a vertex's incidence list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    pub edge: usize,
    pub neighbor: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    incidence: Vec<Vec<Incidence>>,
}

impl Graph {
    /// Build a graph from `(u, v, weight)` triples.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        let mut list = Vec::new();
        let mut incidence = vec![Vec::new(); n];
        for (id, (u, v, weight)) in edges.into_iter().enumerate() {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { edge: id, vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { edge: id, vertex: u });
            }
            if weight == 0 {
                return Err(GraphError::ZeroWeight { edge: id });
            }
            incidence[u].push(Incidence { edge: id, neighbor: v });
            incidence[v].push(Incidence { edge: id, neighbor: u });
            list.push(Edge { u, v, weight });
        }
        Ok(Self { n, edges: list, incidence })
    }

    /// Build a unit-weight graph from endpoint pairs.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::new(n, pairs.iter().map(|&(u, v)| (u, v, 1)))
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn incident(&self, v: usize) -> &[Incidence] {
        &self.incidence[v]
    }

    /// Number of incident edges (parallel edges counted separately).
    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn is_unit_weight(&self) -> bool {
        self.edges.iter().all(|e| e.weight == 1)
    }

    /// `|E| - |V|`.
    pub fn euler_characteristic(&self) -> i64 {
        self.edges.len() as i64 - self.n as i64
    }

    /// `|E| - |V| + c` where `c` is the number of connected components.
    pub fn circuit_rank(&self) -> i64 {
        let c = components(self).0 as i64;
        self.euler_characteristic() + c
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && components(self).0 == 1
    }

    /// Dense adjacency counts (`a[u][v]` = number of parallel `u`-`v` edges).
    pub fn adjacency_counts(&self) -> Vec<Vec<u64>> {
        let mut a = vec![vec![0u64; self.n]; self.n];
        for e in &self.edges {
            a[e.u][e.v] += 1;
            a[e.v][e.u] += 1;
        }
        a
    }

    /// Replace each weight-`w` edge by a path of `w` unit edges through
    /// `w - 1` fresh degree-two vertices. Original vertices keep their ids;
    /// new vertices are appended in edge order.
    pub fn inflate(&self) -> Graph {
        let mut n = self.n;
        let mut out = Vec::with_capacity(self.edges.iter().map(|e| e.weight as usize).sum());
        for e in &self.edges {
            let mut prev = e.u;
            for _ in 1..e.weight {
                out.push((prev, n, 1));
                prev = n;
                n += 1;
            }
            out.push((prev, e.v, 1));
        }
        Graph::new(n, out).expect("inflation of a valid graph is valid")
    }
}

/// Directed arcs of a graph: edge `e = (u, v)` yields arc `2e` from `u` to
/// `v` and arc `2e + 1` from `v` to `u`.
#[derive(Debug, Clone)]
pub struct ArcIndex {
    tails: Vec<usize>,
    heads: Vec<usize>,
    outgoing: Vec<Vec<usize>>,
}

impl ArcIndex {
    pub fn new(g: &Graph) -> Self {
        let m = g.n_edges();
        let mut tails = Vec::with_capacity(2 * m);
        let mut heads = Vec::with_capacity(2 * m);
        let mut outgoing = vec![Vec::new(); g.n_vertices()];
        for (id, e) in g.edges().iter().enumerate() {
            tails.extend([e.u, e.v]);
            heads.extend([e.v, e.u]);
            outgoing[e.u].push(2 * id);
            outgoing[e.v].push(2 * id + 1);
        }
        Self { tails, heads, outgoing }
    }

    pub fn len(&self) -> usize {
        self.tails.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tails.is_empty()
    }

    pub fn tail(&self, arc: usize) -> usize {
        self.tails[arc]
    }

    pub fn head(&self, arc: usize) -> usize {
        self.heads[arc]
    }

    pub fn reverse(&self, arc: usize) -> usize {
        arc ^ 1
    }

    pub fn edge_of(&self, arc: usize) -> usize {
        arc / 2
    }

    /// Arcs whose tail is `v`.
    pub fn outgoing(&self, v: usize) -> &[usize] {
        &self.outgoing[v]
    }

    /// Arcs that continue `arc` without reversing it.
    pub fn non_backtracking_successors(&self, arc: usize) -> impl Iterator<Item = usize> + '_ {
        let back = self.reverse(arc);
        self.outgoing[self.head(arc)].iter().copied().filter(move |&b| b != back)
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn construction_examples() {
        let t = Graph::from_pairs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!((t.n_vertices(), t.n_edges()), (3, 3));
        let k4 = complete(4);
        assert_eq!((k4.n_vertices(), k4.n_edges()), (4, 6));
    }

    #[test]
    fn construction_errors_are_distinct() {
        assert!(matches!(Graph::new(2, [(0, 0, 1)]), Err(GraphError::SelfLoop { edge: 0, vertex: 0 })));
        assert!(matches!(
            Graph::new(2, [(0, 1, 1), (1, 2, 1)]),
            Err(GraphError::VertexOutOfRange { edge: 1, vertex: 2, n: 2 })
        ));
        assert!(matches!(Graph::new(2, [(0, 1, 0)]), Err(GraphError::ZeroWeight { edge: 0 })));
    }

    #[test]
    fn euler_characteristic_examples() {
        assert_eq!(cycle(3).euler_characteristic(), 0);
        assert_eq!(complete(4).euler_characteristic(), 2);
        assert_eq!(path(2).euler_characteristic(), -1);
    }

    #[test]
    fn inflation_examples() {
        let t = cycle(3);
        assert_eq!(t.inflate(), t);

        let single = Graph::new(2, [(0, 1, 3)]).unwrap();
        let p = single.inflate();
        assert_eq!((p.n_vertices(), p.n_edges()), (4, 3));
        assert_eq!(p.degree(2), 2);
        assert_eq!(p.degree(3), 2);
        assert_eq!(p.degree(0), 1);
        assert_eq!(p.degree(1), 1);

        let w = Graph::new(3, [(0, 1, 2), (1, 2, 1), (2, 0, 1)]).unwrap();
        let c4 = w.inflate();
        assert_eq!((c4.n_vertices(), c4.n_edges()), (4, 4));
        assert!((0..4).all(|v| c4.degree(v) == 2));
    }

    #[test]
    fn arc_index_pairs_reverses() {
        let k4 = complete(4);
        let arcs = ArcIndex::new(&k4);
        assert_eq!(arcs.len(), 12);
        for a in 0..arcs.len() {
            assert_eq!(arcs.reverse(arcs.reverse(a)), a);
            assert_eq!(arcs.tail(a), arcs.head(arcs.reverse(a)));
            assert_eq!(arcs.non_backtracking_successors(a).count(), 2);
        }
    }

    fn weighted_graph() -> impl Strategy<Value = Graph> {
        (2usize..8).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n, 1u64..5), 0..14).prop_map(move |raw| {
                let edges: Vec<_> = raw.into_iter().filter(|(u, v, _)| u != v).collect();
                Graph::new(n, edges).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn inflation_preserves_euler_characteristic(g in weighted_graph()) {
            let inflated = g.inflate();
            prop_assert_eq!(inflated.euler_characteristic(), g.euler_characteristic());
            let extra: u64 = g.edges().iter().map(|e| e.weight - 1).sum();
            prop_assert_eq!(inflated.n_vertices() as u64, g.n_vertices() as u64 + extra);
            prop_assert_eq!(inflated.n_edges() as u64, g.edges().iter().map(|e| e.weight).sum::<u64>());
            prop_assert!(inflated.is_unit_weight());
            for v in g.n_vertices()..inflated.n_vertices() {
                prop_assert_eq!(inflated.degree(v), 2);
            }
            // idempotent once weights are all one
            prop_assert_eq!(inflated.inflate(), inflated);
        }
    }
}
