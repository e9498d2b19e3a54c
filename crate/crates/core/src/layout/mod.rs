//! Graphs built from co-occurrence counts and their spring-embedder layout.
//!
//! Layout only ever sees the binarized adjacency: edge weights are kept on
//! the graph for rendering line widths and never influence positions.

mod kamada_kawai;
mod pajek;
mod svg;

use std::collections::{HashSet, VecDeque};

use nalgebra::DMatrix;
use thiserror::Error;

pub use kamada_kawai::{kamada_kawai, spring_energy, KamadaKawaiConfig, LayoutResult};
pub use pajek::{export_pajek, import_pajek};
pub use svg::{export_svg, stroke_width, SvgStyle};

use crate::matrix::CooccurrenceMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayoutError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("layout needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("graph has {components} connected components and component packing is disabled")]
    DisconnectedGraph { components: usize },
    #[error("invalid layout configuration: {0}")]
    InvalidConfig(String),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// An undirected edge with `i < j` and positive weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Undirected weighted graph without self-loops or parallel edges.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    node_labels: Vec<String>,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(node_labels: Vec<String>, edges: Vec<Edge>) -> Result<Self, LayoutError> {
        let n = node_labels.len();
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.i >= e.j {
                return Err(LayoutError::InvalidGraph(format!("edge ({}, {}) must satisfy i < j", e.i, e.j)));
            }
            if e.j >= n {
                return Err(LayoutError::InvalidGraph(format!("edge ({}, {}) refers past {n} nodes", e.i, e.j)));
            }
            if !(e.weight > 0.0 && e.weight.is_finite()) {
                return Err(LayoutError::InvalidGraph(format!("edge ({}, {}) has weight {}", e.i, e.j, e.weight)));
            }
            if !seen.insert((e.i, e.j)) {
                return Err(LayoutError::InvalidGraph(format!("duplicate edge ({}, {})", e.i, e.j)));
            }
        }
        Ok(Self { node_labels, edges })
    }

    pub fn node_labels(&self) -> &[String] {
        &self.node_labels
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.node_labels.len()
    }

    /// Neighbor lists of the binarized adjacency.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        adj
    }

    /// Same graph with every weight multiplied by `factor`.
    pub fn scale_weights(&self, factor: f64) -> Result<Self, LayoutError> {
        let edges = self.edges.iter().map(|e| Edge { weight: e.weight * factor, ..*e }).collect();
        Self::new(self.node_labels.clone(), edges)
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.node_count()];
        let mut out = Vec::new();
        for start in 0..self.node_count() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &u in &adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Edge `(i, j)` for every off-diagonal count of at least `threshold`,
/// weighted by the count. Nodes without edges stay in the node list.
pub fn graph_from_cooccurrence(m: &CooccurrenceMatrix, threshold: u64) -> Result<WeightedGraph, LayoutError> {
    if threshold == 0 {
        return Err(LayoutError::InvalidConfig("threshold must be at least 1".into()));
    }
    let n = m.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let c = m.get(i, j);
            if c >= threshold {
                edges.push(Edge { i, j, weight: c as f64 });
            }
        }
    }
    WeightedGraph::new(m.labels().to_vec(), edges)
}

/// Breadth-first hop counts; unreachable pairs are `f64::INFINITY`.
pub fn shortest_path_lengths(g: &WeightedGraph) -> DMatrix<f64> {
    let n = g.node_count();
    let adj = g.adjacency();
    let mut d = DMatrix::from_element(n, n, f64::INFINITY);
    for s in 0..n {
        d[(s, s)] = 0.0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            let next = d[(s, v)] + 1.0;
            for &u in &adj[v] {
                if d[(s, u)].is_infinite() {
                    d[(s, u)] = next;
                    queue.push_back(u);
                }
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{cooccurrence, DiagonalPolicy, OccurrenceMatrix};

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("n{i}")).collect()
    }

    fn figure1() -> CooccurrenceMatrix {
        CooccurrenceMatrix::new(
            names(4),
            DMatrix::from_row_slice(4, 4, &[0, 10, 20, 25, 10, 0, 30, 15, 20, 30, 0, 12, 25, 15, 12, 0]),
            DiagonalPolicy::Zeroed,
        )
        .unwrap()
    }

    fn figure2_graph() -> WeightedGraph {
        let a = OccurrenceMatrix::from_rows(
            names(5),
            ["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect(),
            &[vec![1, 1, 0, 1], vec![0, 0, 1, 1], vec![0, 0, 1, 1], vec![1, 1, 0, 0], vec![1, 1, 0, 1]],
        )
        .unwrap();
        graph_from_cooccurrence(&cooccurrence(&a, DiagonalPolicy::Raw), 1).unwrap()
    }

    #[test]
    fn figure1_is_weighted_k4() {
        let g = graph_from_cooccurrence(&figure1(), 1).unwrap();
        let w: Vec<f64> = g.edges().iter().map(|e| e.weight).collect();
        assert_eq!(w, vec![10.0, 20.0, 25.0, 30.0, 15.0, 12.0]);
        let none = graph_from_cooccurrence(&figure1(), 31).unwrap();
        assert!(none.edges().is_empty());
        assert_eq!(none.node_count(), 4);
    }

    #[test]
    fn figure2_edges_and_paths() {
        let g = figure2_graph();
        let pairs: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.i, e.j)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 3), (1, 3), (2, 3)]);
        let d = shortest_path_lengths(&g);
        assert_eq!(d[(0, 2)], 2.0);
        assert_eq!(d[(1, 2)], 2.0);
        assert_eq!(d[(0, 3)], 1.0);
    }

    #[test]
    fn path_and_disconnected_distances() {
        let g = WeightedGraph::new(names(4), vec![Edge { i: 0, j: 1, weight: 1.0 }, Edge { i: 1, j: 2, weight: 1.0 }])
            .unwrap();
        let d = shortest_path_lengths(&g);
        assert_eq!(d[(0, 2)], 2.0);
        assert!(d[(0, 3)].is_infinite());
        assert_eq!(g.components(), vec![vec![0, 1, 2], vec![3]]);
    }

    #[test]
    fn invalid_graphs() {
        assert!(WeightedGraph::new(names(2), vec![Edge { i: 1, j: 0, weight: 1.0 }]).is_err());
        assert!(WeightedGraph::new(names(2), vec![Edge { i: 0, j: 1, weight: 0.0 }]).is_err());
        assert!(WeightedGraph::new(names(2), vec![Edge { i: 0, j: 2, weight: 1.0 }]).is_err());
        let dup = vec![Edge { i: 0, j: 1, weight: 1.0 }, Edge { i: 0, j: 1, weight: 2.0 }];
        assert!(WeightedGraph::new(names(2), dup).is_err());
    }
}
