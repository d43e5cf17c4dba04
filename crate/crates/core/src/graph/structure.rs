//! Deterministic ground truth: components, bridges and the global minimum
//! cut. These are the oracles the stochastic detector is scored against.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

use super::{Graph, GraphError};

/// Graphs up to this many vertices get their minimum cut by exhaustive
/// bipartition enumeration.
pub const EXHAUSTIVE_CUT_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub component_count: usize,
    pub component_labels: Vec<usize>,
    /// Total weight of a minimum edge cut; 0 when disconnected.
    pub global_min_cut: u64,
    pub disconnected: bool,
    pub bridge_count: usize,
}

/// Component count and per-vertex labels (labels in order of first vertex).
pub fn components(g: &Graph) -> (usize, Vec<usize>) {
    let n = g.n_vertices();
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = count;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for inc in g.incident(v) {
                if label[inc.neighbor] == usize::MAX {
                    label[inc.neighbor] = count;
                    stack.push(inc.neighbor);
                }
            }
        }
        count += 1;
    }
    (count, label)
}

/// Edge ids whose removal disconnects their component. Parallel edges are
/// never bridges.
pub fn bridges(g: &Graph) -> Vec<usize> {
    let n = g.n_vertices();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut out = Vec::new();
    let mut time = 0;
    // (vertex, edge used to enter it, next incidence index)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(top) = stack.last_mut() {
            let (v, via) = (top.0, top.1);
            if let Some(inc) = g.incident(v).get(top.2) {
                top.2 += 1;
                if inc.edge == via {
                    continue;
                }
                let w = inc.neighbor;
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, inc.edge, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        out.push(via);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Minimum cut by enumerating every bipartition that keeps vertex 0 on one
/// side. Exponential; `None` above [`EXHAUSTIVE_CUT_LIMIT`] vertices.
pub fn min_cut_exhaustive(g: &Graph) -> Option<u64> {
    let n = g.n_vertices();
    if !(2..=EXHAUSTIVE_CUT_LIMIT).contains(&n) {
        return None;
    }
    let mut best = u64::MAX;
    for mask in 0u32..(1 << (n - 1)) {
        // vertex 0 always on side A; mask bit i-1 puts vertex i on side B
        if mask == (1 << (n - 1)) - 1 {
            continue;
        }
        let side = |v: usize| v != 0 && mask & (1 << (v - 1)) == 0;
        let cut: u64 = g
            .edges()
            .iter()
            .filter(|e| side(e.u) != side(e.v))
            .map(|e| e.weight)
            .sum();
        best = best.min(cut);
    }
    Some(best)
}

/// Stoer-Wagner minimum cut with a lazy max-heap per phase.
/// Returns 0 for disconnected graphs and `None` for fewer than 2 vertices.
pub fn min_cut_stoer_wagner(g: &Graph) -> Option<u64> {
    let n = g.n_vertices();
    if n < 2 {
        return None;
    }
    if components(g).0 > 1 {
        return Some(0);
    }
    let mut adj: Vec<BTreeMap<usize, u64>> = vec![BTreeMap::new(); n];
    for e in g.edges() {
        *adj[e.u].entry(e.v).or_default() += e.weight;
        *adj[e.v].entry(e.u).or_default() += e.weight;
    }
    let mut active: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    let mut in_a = vec![false; n];
    let mut key = vec![0u64; n];
    while active.len() > 1 {
        for &v in &active {
            in_a[v] = false;
            key[v] = 0;
        }
        let mut heap = BinaryHeap::new();
        heap.push((0u64, Reverse(active[0])));
        let (mut prev, mut last) = (usize::MAX, usize::MAX);
        let mut phase_cut = 0;
        while let Some((k, Reverse(v))) = heap.pop() {
            if in_a[v] || k != key[v] {
                continue;
            }
            in_a[v] = true;
            prev = last;
            last = v;
            phase_cut = k;
            for (&w, &c) in &adj[v] {
                if !in_a[w] {
                    key[w] += c;
                    heap.push((key[w], Reverse(w)));
                }
            }
        }
        best = best.min(phase_cut);
        // merge `last` into `prev`
        let moved = std::mem::take(&mut adj[last]);
        for (w, c) in moved {
            adj[w].remove(&last);
            if w != prev {
                *adj[prev].entry(w).or_default() += c;
                *adj[w].entry(prev).or_default() += c;
            }
        }
        active.retain(|&v| v != last);
    }
    Some(best)
}

pub fn structure_report(g: &Graph) -> Result<StructureReport, GraphError> {
    if g.n_vertices() == 0 {
        return Err(GraphError::Empty);
    }
    let (component_count, component_labels) = components(g);
    let global_min_cut = if g.n_vertices() == 1 {
        0
    } else if let Some(exact) = min_cut_exhaustive(g) {
        debug_assert_eq!(Some(exact), min_cut_stoer_wagner(g));
        exact
    } else {
        min_cut_stoer_wagner(g).unwrap_or(0)
    };
    Ok(StructureReport {
        component_count,
        component_labels,
        global_min_cut,
        disconnected: component_count > 1,
        bridge_count: bridges(g).len(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::named::*;
    use super::*;
    use proptest::prelude::*;

    fn two_triangles(joined: bool) -> Graph {
        let mut pairs = vec![(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)];
        if joined {
            pairs.push((2, 3));
        }
        Graph::from_pairs(6, &pairs).unwrap()
    }

    #[test]
    fn report_examples() {
        let r = structure_report(&two_triangles(false)).unwrap();
        assert_eq!((r.component_count, r.global_min_cut), (2, 0));
        assert!(r.disconnected);
        assert_eq!(r.component_labels, vec![0, 0, 0, 1, 1, 1]);

        let r = structure_report(&two_triangles(true)).unwrap();
        assert_eq!((r.component_count, r.bridge_count, r.global_min_cut), (1, 1, 1));

        let r = structure_report(&complete(4)).unwrap();
        assert_eq!((r.component_count, r.bridge_count, r.global_min_cut), (1, 0, 3));
    }

    #[test]
    fn empty_graph_is_an_error() {
        let g = Graph::new(0, []).unwrap();
        assert!(matches!(structure_report(&g), Err(GraphError::Empty)));
    }

    #[test]
    fn parallel_edges_are_not_bridges() {
        let g = Graph::from_pairs(3, &[(0, 1), (0, 1), (1, 2)]).unwrap();
        assert_eq!(bridges(&g), vec![2]);
        assert_eq!(min_cut_stoer_wagner(&g), Some(1));
    }

    #[test]
    fn stoer_wagner_on_larger_graphs() {
        let g = petersen();
        assert_eq!(min_cut_stoer_wagner(&g), Some(3));
        assert_eq!(min_cut_exhaustive(&g), Some(3));
        assert_eq!(min_cut_stoer_wagner(&grid(5, 6)), Some(2));
        assert_eq!(min_cut_stoer_wagner(&complete(20)), Some(19));
        let weighted = Graph::new(4, [(0, 1, 5), (1, 2, 1), (2, 3, 7), (3, 0, 2)]).unwrap();
        assert_eq!(min_cut_stoer_wagner(&weighted), Some(3));
        assert_eq!(min_cut_exhaustive(&weighted), Some(3));
    }

    fn small_graph() -> impl Strategy<Value = Graph> {
        (2usize..10).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n), 0..22).prop_map(move |raw| {
                let pairs: Vec<_> = raw.into_iter().filter(|(u, v)| u != v).collect();
                Graph::from_pairs(n, &pairs).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn min_cut_zero_iff_disconnected(g in small_graph()) {
            let r = structure_report(&g).unwrap();
            prop_assert!(r.component_count >= 1);
            prop_assert_eq!(r.global_min_cut == 0, r.component_count > 1);
            prop_assert_eq!(min_cut_stoer_wagner(&g), min_cut_exhaustive(&g));
        }

        #[test]
        fn deleting_a_bridge_splits_one_component(g in small_graph()) {
            let before = components(&g).0;
            for b in bridges(&g) {
                let kept: Vec<_> = g.edges().iter().enumerate()
                    .filter(|(id, _)| *id != b)
                    .map(|(_, e)| (e.u, e.v, e.weight))
                    .collect();
                let h = Graph::new(g.n_vertices(), kept).unwrap();
                prop_assert_eq!(components(&h).0, before + 1);
            }
        }
    }
}
