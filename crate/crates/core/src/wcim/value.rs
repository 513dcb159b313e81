//! `r(S) = max_{w′ ∈ C} r(S, w′)` on graph classes where it decomposes.

use super::confidence::ConfidenceSet;
use super::ellipsoid::BoxMode;
use crate::error::{Error, Result};
use crate::graph::{layers_of, reachable_from, Graph};
use serde::{Deserialize, Serialize};

/// A set function together with the weights that realize its value.
pub trait SetValue: Sync {
    /// Number of nodes in the underlying graph.
    fn n(&self) -> usize;

    /// Nodes eligible as seeds, sorted.
    fn ground(&self) -> Vec<usize> {
        (0..self.n()).collect()
    }

    /// The value of `seeds` and a per-edge weight vector attaining it.
    fn evaluate(&self, seeds: &[usize]) -> Result<(f64, Vec<f64>)>;

    fn value(&self, seeds: &[usize]) -> Result<f64> {
        Ok(self.evaluate(seeds)?.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DagValue {
    /// `r(S)`.
    pub value: f64,
    /// `r_S^v`: the optimistic activation probability of every node.
    pub per_node: Vec<f64>,
    /// The maximizing weights, per edge.
    pub weights: Vec<f64>,
}

fn center(set: &ConfidenceSet, graph: &Graph, mode: BoxMode) -> Vec<f64> {
    let mut w = set.estimate(graph);
    if mode == BoxMode::BoxClipped {
        w.iter_mut().for_each(|x| *x = x.clamp(0.0, 1.0));
    }
    w
}

/// Layered computation of `r(S)`.
///
/// Nodes unreachable from `S` are fixed at 0 and in-edges of seeds are
/// dropped. An edge `u → v` is also dropped when every path from `S` to `u`
/// passes through `v`: such an edge can never be the one that activates `v`.
/// On a DAG neither reduction changes anything; on a cyclic graph they may
/// leave an acyclic core, in which case the recursion is still exact.
pub fn wcim_value_dag(graph: &Graph, set: &ConfidenceSet, seeds: &[usize], mode: BoxMode) -> Result<DagValue> {
    let n = graph.n();
    let mut is_seed = vec![false; n];
    for &s in seeds {
        if s >= n {
            return Err(Error::NodeOutOfRange { id: s, n });
        }
        is_seed[s] = true;
    }
    let reach = reachable_from(graph, seeds);
    let mut kept = vec![false; graph.m()];
    let acyclic = graph.is_acyclic();
    for v in (0..n).filter(|&v| reach[v] && !is_seed[v]) {
        let avoiding = if acyclic {
            None
        } else {
            Some(reachable_avoiding(graph, seeds, v))
        };
        for e in graph.in_edges(v) {
            let u = graph.source(e);
            kept[e] = reach[u] && avoiding.as_ref().is_none_or(|a| a[u]);
        }
    }
    let layers = layers_of(graph, &kept, &reach).ok_or(Error::NotADag)?;

    let mut r = vec![0.0; n];
    let mut weights = center(set, graph, mode);
    for v in layers.into_iter().flatten() {
        if is_seed[v] {
            r[v] = 1.0;
            continue;
        }
        let Some(ell) = set.get(v) else { continue };
        let c: Vec<f64> = graph
            .in_edges(v)
            .map(|e| if kept[e] { r[graph.source(e)] } else { 0.0 })
            .collect();
        let best = ell.max_linear(&c, mode);
        r[v] = best.value;
        weights[graph.in_edges(v)].copy_from_slice(&best.argmax);
    }
    Ok(DagValue {
        value: r.iter().sum(),
        per_node: r,
        weights,
    })
}

fn reachable_avoiding(graph: &Graph, seeds: &[usize], blocked: usize) -> Vec<bool> {
    let mut seen = vec![false; graph.n()];
    seen[blocked] = true;
    let mut stack: Vec<usize> = seeds.iter().copied().filter(|&s| s != blocked).collect();
    for &s in &stack {
        seen[s] = true;
    }
    while let Some(u) = stack.pop() {
        for v in graph.out_neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen[blocked] = false;
    seen
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BipartiteConvention {
    /// Expected number of activated targets, excluding the seeds.
    #[default]
    EdgeSum,
    /// Expected number of active nodes, seeds included.
    FullSpread,
}

/// Left partition of a bipartite graph: the nodes without in-edges. Fails
/// when some node has both in- and out-edges.
pub fn bipartite_left(graph: &Graph) -> Result<Vec<bool>> {
    if let Some(v) = (0..graph.n()).find(|&v| graph.in_degree(v) > 0 && graph.out_degree(v) > 0) {
        return Err(Error::NotBipartite(v));
    }
    Ok((0..graph.n()).map(|v| graph.in_degree(v) == 0).collect())
}

/// Per-target decomposition: `Σ_{v ∈ V₂} max_{w′_v ∈ C_v} Σ_{u ∈ S ∩ N(v)} w′_v(e_{u,v})`.
pub fn bipartite_value(
    graph: &Graph,
    set: &ConfidenceSet,
    seeds: &[usize],
    mode: BoxMode,
    convention: BipartiteConvention,
) -> Result<(f64, Vec<f64>)> {
    let left = bipartite_left(graph)?;
    let mut in_s = vec![false; graph.n()];
    for &s in seeds {
        if s >= graph.n() {
            return Err(Error::NodeOutOfRange { id: s, n: graph.n() });
        }
        if !left[s] {
            return Err(Error::SeedOutsideLeftPartition(s));
        }
        in_s[s] = true;
    }
    let mut weights = center(set, graph, mode);
    let mut total = 0.0;
    for v in (0..graph.n()).filter(|&v| !left[v]) {
        let ell = set.get(v).expect("right nodes have in-edges");
        let c: Vec<f64> = graph
            .in_neighbors(v)
            .iter()
            .map(|&u| if in_s[u] { 1.0 } else { 0.0 })
            .collect();
        let best = ell.max_linear(&c, mode);
        total += best.value;
        weights[graph.in_edges(v)].copy_from_slice(&best.argmax);
    }
    if convention == BipartiteConvention::FullSpread {
        let mut distinct = seeds.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        total += distinct.len() as f64;
    }
    Ok((total, weights))
}

/// [`wcim_value_dag`] as a [`SetValue`].
#[derive(Debug, Clone, Copy)]
pub struct LayeredValue<'a> {
    pub graph: &'a Graph,
    pub set: &'a ConfidenceSet,
    pub mode: BoxMode,
}

impl SetValue for LayeredValue<'_> {
    fn n(&self) -> usize {
        self.graph.n()
    }

    fn evaluate(&self, seeds: &[usize]) -> Result<(f64, Vec<f64>)> {
        let r = wcim_value_dag(self.graph, self.set, seeds, self.mode)?;
        Ok((r.value, r.weights))
    }
}

/// [`bipartite_value`] as a [`SetValue`] whose ground set is the left
/// partition.
#[derive(Debug, Clone)]
pub struct BipartiteValue<'a> {
    pub graph: &'a Graph,
    pub set: &'a ConfidenceSet,
    pub mode: BoxMode,
    pub convention: BipartiteConvention,
}

impl SetValue for BipartiteValue<'_> {
    fn n(&self) -> usize {
        self.graph.n()
    }

    fn ground(&self) -> Vec<usize> {
        match bipartite_left(self.graph) {
            Ok(left) => (0..self.n()).filter(|&v| left[v]).collect(),
            Err(_) => Vec::new(),
        }
    }

    fn evaluate(&self, seeds: &[usize]) -> Result<(f64, Vec<f64>)> {
        bipartite_value(self.graph, self.set, seeds, self.mode, self.convention)
    }
}
