//! Directed weighted graphs with per-target edge grouping.
//!
//! Edges are stored in canonical order: sorted by target, then by source.
//! The in-edges of a node therefore occupy one contiguous id range, and the
//! per-node weight vector `w_v` is a plain slice of the global weight
//! vector, with coordinates ordered by in-neighbor id.

mod generate;
mod io;
mod relevance;

pub use generate::{generate, Family, GraphFamilyParams, Orientation, WeightRule};
pub use io::{load_graph, load_weights_for, save_graph, GraphFile, FORMAT_VERSION};
pub use relevance::{gamma_diagnostic, reachable_from, reaches, relevance_counts, relevance_set, GammaMode};

use crate::error::{Error, Result};
use std::collections::VecDeque;
use std::ops::Range;

/// Slack allowed when checking that in-weights sum to at most one.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    sources: Vec<usize>,
    targets: Vec<usize>,
    in_offsets: Vec<usize>,
    out_edges: Vec<Vec<EdgeId>>,
}

impl Graph {
    /// Builds a graph on nodes `0..n` from `(source, target)` pairs.
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize)> = Vec::with_capacity(pairs.len());
        for &(s, t) in pairs {
            for id in [s, t] {
                if id >= n {
                    return Err(Error::NodeOutOfRange { id, n });
                }
            }
            if s == t {
                return Err(Error::SelfLoop(s));
            }
            sorted.push((t, s));
        }
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge {
                from: w[0].1,
                to: w[0].0,
            });
        }

        let m = sorted.len();
        let mut sources = Vec::with_capacity(m);
        let mut targets = Vec::with_capacity(m);
        let mut in_offsets = vec![0; n + 1];
        let mut out_edges = vec![Vec::new(); n];
        for (e, &(t, s)) in sorted.iter().enumerate() {
            sources.push(s);
            targets.push(t);
            in_offsets[t + 1] += 1;
            out_edges[s].push(e);
        }
        for v in 0..n {
            in_offsets[v + 1] += in_offsets[v];
        }
        for list in &mut out_edges {
            list.sort_unstable_by_key(|&e| targets[e]);
        }
        Ok(Self {
            n,
            sources,
            targets,
            in_offsets,
            out_edges,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.sources.len()
    }

    pub fn source(&self, e: EdgeId) -> usize {
        self.sources[e]
    }

    pub fn target(&self, e: EdgeId) -> usize {
        self.targets[e]
    }

    pub fn edge(&self, e: EdgeId) -> (usize, usize) {
        (self.sources[e], self.targets[e])
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.sources.iter().copied().zip(self.targets.iter().copied())
    }

    /// Edge ids of the in-edges of `v`, in in-neighbor order.
    pub fn in_edges(&self, v: usize) -> Range<EdgeId> {
        self.in_offsets[v]..self.in_offsets[v + 1]
    }

    /// `N(v)`, sorted by id.
    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.sources[self.in_edges(v)]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    pub fn max_in_degree(&self) -> usize {
        (0..self.n).map(|v| self.in_degree(v)).max().unwrap_or(0)
    }

    /// Out-edge ids of `u`, sorted by target.
    pub fn out_edges(&self, u: usize) -> &[EdgeId] {
        &self.out_edges[u]
    }

    pub fn out_neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.out_edges[u].iter().map(|&e| self.targets[e])
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out_edges[u].len()
    }

    pub fn edge_id(&self, source: usize, target: usize) -> Option<EdgeId> {
        if source >= self.n || target >= self.n {
            return None;
        }
        let range = self.in_edges(target);
        let start = range.start;
        self.sources[range].binary_search(&source).ok().map(|i| start + i)
    }

    /// Position of `source` inside `N(target)`.
    pub fn in_position(&self, source: usize, target: usize) -> Option<usize> {
        self.in_neighbors(target).binary_search(&source).ok()
    }

    /// Kahn layering of the whole graph; `None` when there is a cycle.
    pub fn topological_layers(&self) -> Option<Vec<Vec<usize>>> {
        let all = vec![true; self.m()];
        layers_of(self, &all, &vec![true; self.n])
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_layers().is_some()
    }
}

/// Kahn layering restricted to the active nodes and kept edges.
pub(crate) fn layers_of(graph: &Graph, kept: &[bool], active: &[bool]) -> Option<Vec<Vec<usize>>> {
    let n = graph.n();
    let mut indeg = vec![0usize; n];
    for (e, &keep) in kept.iter().enumerate() {
        let (s, t) = graph.edge(e);
        if keep && active[s] && active[t] {
            indeg[t] += 1;
        }
    }
    let mut layer: Vec<usize> = (0..n).filter(|&v| active[v] && indeg[v] == 0).collect();
    let mut layers = Vec::new();
    let mut placed = 0;
    let total = active.iter().filter(|&&a| a).count();
    while !layer.is_empty() {
        placed += layer.len();
        let mut next = Vec::new();
        for &u in &layer {
            for &e in graph.out_edges(u) {
                let t = graph.target(e);
                if kept[e] && active[t] {
                    indeg[t] -= 1;
                    if indeg[t] == 0 {
                        next.push(t);
                    }
                }
            }
        }
        next.sort_unstable();
        layers.push(std::mem::replace(&mut layer, next));
    }
    (placed == total).then_some(layers)
}

/// Per-edge weights, indexed by [`EdgeId`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    values: Vec<f64>,
}

impl WeightVector {
    /// Validates range and the per-node sum constraint.
    pub fn new(graph: &Graph, values: Vec<f64>) -> Result<Self> {
        if values.len() != graph.m() {
            return Err(Error::WeightLengthMismatch {
                expected: graph.m(),
                actual: values.len(),
            });
        }
        for (e, &w) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&w) {
                let (source, target) = graph.edge(e);
                return Err(Error::WeightOutOfRange {
                    from: source,
                    to: target,
                    weight: w,
                });
            }
        }
        for v in 0..graph.n() {
            let sum: f64 = values[graph.in_edges(v)].iter().sum();
            if sum > 1.0 + WEIGHT_SUM_TOLERANCE {
                return Err(Error::WeightSumExceedsOne { node: v, sum });
            }
        }
        Ok(Self { values })
    }

    /// Clamps every weight into `[0, 1]`, then rescales each node whose
    /// in-weights sum above one by `1 / (sum + 1e-9)`.
    pub fn normalized(graph: &Graph, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != graph.m() {
            return Err(Error::WeightLengthMismatch {
                expected: graph.m(),
                actual: values.len(),
            });
        }
        for w in values.iter_mut() {
            *w = w.clamp(0.0, 1.0);
        }
        for v in 0..graph.n() {
            let range = graph.in_edges(v);
            let sum: f64 = values[range.clone()].iter().sum();
            if sum > 1.0 {
                let scale = 1.0 / (sum + 1e-9);
                for w in &mut values[range] {
                    *w *= scale;
                }
            }
        }
        Self::new(graph, values)
    }

    pub fn zeros(graph: &Graph) -> Self {
        Self {
            values: vec![0.0; graph.m()],
        }
    }

    pub fn get(&self, e: EdgeId) -> f64 {
        self.values[e]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    /// `w_v`, ordered like `N(v)`.
    pub fn node<'a>(&'a self, graph: &Graph, v: usize) -> &'a [f64] {
        &self.values[graph.in_edges(v)]
    }

    pub fn max_abs_diff(&self, other: &WeightVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Builds a graph and its weights from `(source, target, weight)` triples;
/// the node count is one past the largest id.
pub fn build_graph(edges: &[(usize, usize, f64)]) -> Result<(Graph, WeightVector)> {
    let n = edges.iter().map(|&(s, t, _)| s.max(t) + 1).max().unwrap_or(0);
    build_graph_with_nodes(n, edges)
}

pub fn build_graph_with_nodes(n: usize, edges: &[(usize, usize, f64)]) -> Result<(Graph, WeightVector)> {
    let pairs: Vec<(usize, usize)> = edges.iter().map(|&(s, t, _)| (s, t)).collect();
    let graph = Graph::new(n, &pairs)?;
    let mut values = vec![0.0; graph.m()];
    for &(s, t, w) in edges {
        let e = graph.edge_id(s, t).expect("edge was just inserted");
        values[e] = w;
    }
    let weights = WeightVector::new(&graph, values)?;
    Ok((graph, weights))
}

/// Breadth-first distances from a seed set; `None` for unreachable nodes.
pub fn bfs_levels(graph: &Graph, seeds: &[usize]) -> Vec<Option<usize>> {
    let mut dist = vec![None; graph.n()];
    let mut queue = VecDeque::new();
    for &s in seeds {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap();
        for v in graph.out_neighbors(u) {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let (g, w) = build_graph(&[(0, 1, 0.5)]).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.m(), 1);
        assert_eq!(g.in_neighbors(1), &[0]);
        assert!(g.in_neighbors(0).is_empty());
        assert_eq!(w.node(&g, 1), &[0.5]);
    }

    #[test]
    fn weight_sum_rejected() {
        match build_graph(&[(0, 1, 0.6), (2, 1, 0.6)]) {
            Err(Error::WeightSumExceedsOne { node, .. }) => assert_eq!(node, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(build_graph(&[(0, 0, 0.1)]), Err(Error::SelfLoop(0))));
        assert!(matches!(
            build_graph(&[(0, 1, 0.1), (0, 1, 0.2)]),
            Err(Error::DuplicateEdge { from: 0, to: 1 })
        ));
        assert!(matches!(build_graph(&[(0, 1, 1.5)]), Err(Error::WeightOutOfRange { .. })));
        assert!(matches!(build_graph(&[(0, 1, -0.1)]), Err(Error::WeightOutOfRange { .. })));
        assert!(matches!(
            build_graph_with_nodes(2, &[(0, 3, 0.1)]),
            Err(Error::NodeOutOfRange { id: 3, n: 2 })
        ));
    }

    #[test]
    fn canonical_order_groups_by_target() {
        let (g, w) = build_graph(&[(3, 1, 0.1), (0, 1, 0.2), (1, 2, 0.3), (2, 1, 0.4)]).unwrap();
        assert_eq!(g.in_neighbors(1), &[0, 2, 3]);
        assert_eq!(w.node(&g, 1), &[0.2, 0.4, 0.1]);
        assert_eq!(g.edge_id(1, 2), Some(3));
        assert_eq!(g.in_position(3, 1), Some(2));
        assert_eq!(g.edge_id(2, 0), None);
        let m_in: usize = (0..g.n()).map(|v| g.in_degree(v)).sum();
        let m_out: usize = (0..g.n()).map(|v| g.out_degree(v)).sum();
        assert_eq!(m_in, g.m());
        assert_eq!(m_out, g.m());
        for u in 0..g.n() {
            for v in g.out_neighbors(u) {
                assert!(g.in_neighbors(v).contains(&u));
            }
        }
    }

    #[test]
    fn layering_detects_cycles() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.topological_layers().unwrap(), vec![vec![0], vec![1], vec![2]]);
        let c = Graph::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(!c.is_acyclic());
    }

    #[test]
    fn normalization_keeps_sum_below_one() {
        let g = Graph::new(3, &[(0, 2), (1, 2)]).unwrap();
        let w = WeightVector::normalized(&g, vec![0.9, 0.8]).unwrap();
        let s: f64 = w.node(&g, 2).iter().sum();
        assert!(s <= 1.0);
        assert!((w.get(0) / w.get(1) - 0.9 / 0.8).abs() < 1e-12);
    }
}
