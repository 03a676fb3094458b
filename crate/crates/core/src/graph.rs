//! The graph induced on input coordinates by a first hidden layer, and
//! exact clique search.
//!
//! Starting from the complete graph on the `d` input coordinates, every
//! first-layer neuron with at least two nonzero weights deletes the edge
//! joining its two smallest nonzero coordinates. An edge already deleted by
//! an earlier neuron is not deleted again; the per-neuron log records which
//! case applied. Vertices are the 1-based input coordinates.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::network::ReluNetwork;
use crate::{Error, Result};

/// What a single first-layer neuron did to the graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RemovalEntry {
    /// The neuron removed this edge.
    Removed { edge: (usize, usize) },
    /// The edge of the neuron's two smallest nonzero coordinates was
    /// already removed by an earlier neuron.
    AlreadyRemoved { edge: (usize, usize) },
    /// The neuron has fewer than two nonzero weights and removes nothing.
    FewerThanTwoNonzeros,
}

/// Undirected graph on the input coordinates `1..=d` with a removal log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightGraph {
    vertex_count: usize,
    /// Sorted edge list, each edge `(u, v)` with `u < v`, 1-based.
    edges: Vec<(usize, usize)>,
    /// One entry per first-layer neuron, in neuron order.
    removal_log: Vec<RemovalEntry>,
}

impl WeightGraph {
    /// The complete graph on `d` vertices with an empty log.
    pub fn complete(d: usize) -> Self {
        let mut edges = Vec::with_capacity(d * (d.saturating_sub(1)) / 2);
        for u in 1..=d {
            for v in (u + 1)..=d {
                edges.push((u, v));
            }
        }
        WeightGraph {
            vertex_count: d,
            edges,
            removal_log: Vec::new(),
        }
    }

    /// Graph with the given edges and an empty log. Edges are normalized to
    /// `(min, max)` order and deduplicated.
    pub fn from_edges(d: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v || u < 1 || v < 1 || u > d || v > d {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) is not a vertex pair of 1..={d}"
                )));
            }
            normalized.push(if u < v { (u, v) } else { (v, u) });
        }
        normalized.sort_unstable();
        normalized.dedup();
        Ok(WeightGraph {
            vertex_count: d,
            edges: normalized,
            removal_log: Vec::new(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn removal_log(&self) -> &[RemovalEntry] {
        &self.removal_log
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let e = if u < v { (u, v) } else { (v, u) };
        self.edges.binary_search(&e).is_ok()
    }

    fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        let e = if u < v { (u, v) } else { (v, u) };
        match self.edges.binary_search(&e) {
            Ok(pos) => {
                self.edges.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    fn neighbors(&self, u: usize) -> Vec<usize> {
        (1..=self.vertex_count)
            .filter(|&v| v != u && self.has_edge(u, v))
            .collect()
    }

    /// DOT rendering; the removal log appears as comments.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph weight_graph {\n");
        for v in 1..=self.vertex_count {
            writeln!(out, "  v{v};").unwrap();
        }
        for (u, v) in &self.edges {
            writeln!(out, "  v{u} -- v{v};").unwrap();
        }
        for (i, entry) in self.removal_log.iter().enumerate() {
            match entry {
                RemovalEntry::Removed { edge } => {
                    writeln!(out, "  // neuron {i}: removed edge ({}, {})", edge.0, edge.1).unwrap()
                }
                RemovalEntry::AlreadyRemoved { edge } => writeln!(
                    out,
                    "  // neuron {i}: edge ({}, {}) already removed",
                    edge.0, edge.1
                )
                .unwrap(),
                RemovalEntry::FewerThanTwoNonzeros => {
                    writeln!(out, "  // neuron {i}: fewer than two nonzero weights").unwrap()
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Builds the weight graph of the first hidden layer of `net`.
///
/// Depth-1 networks have no first hidden layer and yield the complete graph
/// with an empty log.
pub fn first_layer_graph(net: &ReluNetwork) -> WeightGraph {
    let d = net.input_dim();
    let mut graph = WeightGraph::complete(d);
    let Some(first) = net.hidden().first() else {
        return graph;
    };
    for i in 0..first.out_dim() {
        let mut nonzero = first
            .row(i)
            .iter()
            .enumerate()
            .filter(|(_, w)| !num_traits::Zero::is_zero(*w))
            .map(|(j, _)| j + 1);
        let entry = match (nonzero.next(), nonzero.next()) {
            (Some(u), Some(v)) => {
                if graph.remove_edge(u, v) {
                    RemovalEntry::Removed { edge: (u, v) }
                } else {
                    RemovalEntry::AlreadyRemoved { edge: (u, v) }
                }
            }
            _ => RemovalEntry::FewerThanTwoNonzeros,
        };
        graph.removal_log.push(entry);
    }
    graph
}

/// Finds a clique of exactly `r` vertices if one exists, returning the
/// lexicographically smallest one in sorted order. The search is exact:
/// `None` means no such clique exists.
pub fn find_clique(graph: &WeightGraph, r: usize) -> Option<Vec<usize>> {
    if r == 0 {
        return Some(Vec::new());
    }
    if r > graph.vertex_count() {
        return None;
    }
    let mut chosen = Vec::with_capacity(r);
    let candidates: Vec<usize> = (1..=graph.vertex_count()).collect();
    if extend_clique(graph, &mut chosen, &candidates, r) {
        Some(chosen)
    } else {
        None
    }
}

fn extend_clique(
    graph: &WeightGraph,
    chosen: &mut Vec<usize>,
    candidates: &[usize],
    r: usize,
) -> bool {
    if chosen.len() == r {
        return true;
    }
    if chosen.len() + candidates.len() < r {
        return false;
    }
    for (idx, &v) in candidates.iter().enumerate() {
        chosen.push(v);
        let narrowed: Vec<usize> = candidates[idx + 1..]
            .iter()
            .copied()
            .filter(|&u| graph.has_edge(u, v))
            .collect();
        if extend_clique(graph, chosen, &narrowed, r) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// A maximum clique, found by branch and bound with pivoting. Deterministic
/// for a fixed graph. Errors on the empty graph.
pub fn max_clique(graph: &WeightGraph) -> Result<Vec<usize>> {
    if graph.vertex_count() == 0 {
        return Err(Error::InvalidInput("graph has no vertices".into()));
    }
    let mut best: Vec<usize> = Vec::new();
    let p: Vec<usize> = (1..=graph.vertex_count()).collect();
    bron_kerbosch(graph, &mut Vec::new(), p, Vec::new(), &mut best);
    best.sort_unstable();
    Ok(best)
}

fn bron_kerbosch(
    graph: &WeightGraph,
    r: &mut Vec<usize>,
    p: Vec<usize>,
    x: Vec<usize>,
    best: &mut Vec<usize>,
) {
    if r.len() + p.len() <= best.len() {
        return;
    }
    if p.is_empty() {
        if x.is_empty() && r.len() > best.len() {
            *best = r.clone();
        }
        return;
    }
    // pivot: vertex of P union X with the most neighbors in P
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| {
            let count = p.iter().filter(|&&v| graph.has_edge(u, v)).count();
            (count, std::cmp::Reverse(u))
        })
        .expect("p nonempty");
    let branch: Vec<usize> = p
        .iter()
        .copied()
        .filter(|&v| !graph.has_edge(pivot, v))
        .collect();
    let mut p = p;
    let mut x = x;
    for v in branch {
        let neighbors = graph.neighbors(v);
        let p_next: Vec<usize> = p
            .iter()
            .copied()
            .filter(|u| neighbors.contains(u))
            .collect();
        let x_next: Vec<usize> = x
            .iter()
            .copied()
            .filter(|u| neighbors.contains(u))
            .collect();
        r.push(v);
        bron_kerbosch(graph, r, p_next, x_next, best);
        r.pop();
        p.retain(|&u| u != v);
        x.push(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::AffineMap;
    use crate::rational::rint;

    fn net_from_first_layer(rows: Vec<Vec<i64>>) -> ReluNetwork {
        let d = rows[0].len();
        let n = rows.len();
        let rows: Vec<Vec<_>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(rint).collect())
            .collect();
        let hidden = AffineMap::new(rows, vec![rint(0); n], d).unwrap();
        let output = AffineMap::new(vec![vec![rint(1); n]], vec![rint(0)], n).unwrap();
        ReluNetwork::new(d, vec![hidden], output).unwrap()
    }

    #[test]
    fn five_vertex_fixture_removes_four_edges() {
        let net = net_from_first_layer(vec![
            vec![0, 0, 1, -1, 0],
            vec![0, -1, 0, 1, 0],
            vec![1, 0, 0, 0, -1],
            vec![0, 0, 0, 1, -1],
        ]);
        let g = first_layer_graph(&net);
        let removed: Vec<_> = g
            .removal_log()
            .iter()
            .map(|e| match e {
                RemovalEntry::Removed { edge } => *edge,
                other => panic!("unexpected log entry {other:?}"),
            })
            .collect();
        assert_eq!(removed, vec![(3, 4), (2, 4), (1, 5), (4, 5)]);
        assert_eq!(g.edge_count(), 6);
        assert_eq!(
            g.edges(),
            &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 5), (3, 5)]
        );
        assert_eq!(find_clique(&g, 3), Some(vec![1, 2, 3]));
    }

    #[test]
    fn depth1_net_keeps_complete_graph() {
        let output = AffineMap::from_rows(vec![vec![rint(1), rint(0), rint(0)]], vec![rint(0)])
            .unwrap();
        let net = ReluNetwork::new(3, vec![], output).unwrap();
        let g = first_layer_graph(&net);
        assert_eq!(g.edge_count(), 3);
        assert!(g.removal_log().is_empty());
    }

    #[test]
    fn duplicate_support_removes_once() {
        let net = net_from_first_layer(vec![vec![1, 1, 0], vec![2, -3, 0]]);
        let g = first_layer_graph(&net);
        assert_eq!(
            g.removal_log(),
            &[
                RemovalEntry::Removed { edge: (1, 2) },
                RemovalEntry::AlreadyRemoved { edge: (1, 2) }
            ]
        );
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn single_nonzero_neurons_are_flagged() {
        let net = net_from_first_layer(vec![vec![0, 5, 0], vec![0, 0, 0]]);
        let g = first_layer_graph(&net);
        assert_eq!(
            g.removal_log(),
            &[
                RemovalEntry::FewerThanTwoNonzeros,
                RemovalEntry::FewerThanTwoNonzeros
            ]
        );
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn clique_search_on_small_graphs() {
        let k4 = WeightGraph::complete(4);
        assert_eq!(find_clique(&k4, 4), Some(vec![1, 2, 3, 4]));
        assert_eq!(max_clique(&k4).unwrap(), vec![1, 2, 3, 4]);

        let mut edgeless = WeightGraph::complete(5);
        edgeless.edges.clear();
        assert_eq!(find_clique(&edgeless, 2), None);
        assert_eq!(find_clique(&edgeless, 1), Some(vec![1]));
        assert_eq!(max_clique(&edgeless).unwrap().len(), 1);
    }

    #[test]
    fn edge_count_never_drops_below_complete_minus_width() {
        use crate::constructions::{random_network, RationalGrid};
        let grid = RationalGrid::new(-3, 3, 2).unwrap();
        for seed in 0..40u64 {
            let d = 3 + (seed as usize % 5);
            let width = 1 + (seed as usize % 9);
            let net = random_network(d, &[width], grid, seed).unwrap();
            let g = first_layer_graph(&net);
            let complete = d * (d - 1) / 2;
            assert!(g.edge_count() + width >= complete, "d={d} width={width}");
            assert_eq!(g.removal_log().len(), width);
        }
    }

    #[test]
    fn dot_export_mentions_removals() {
        let net = net_from_first_layer(vec![vec![1, -1]]);
        let g = first_layer_graph(&net);
        let dot = g.to_dot();
        assert!(dot.contains("graph weight_graph"));
        assert!(dot.contains("// neuron 0: removed edge (1, 2)"));
        assert!(!dot.contains("v1 -- v2"));
    }
}
