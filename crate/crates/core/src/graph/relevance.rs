//! Relevance sets `V_{S,v}` and the `γ(G)` diagnostic.
//!
//! `V_{S,v}` is computed as (reachable from S) ∩ (reaches v). On DAGs this
//! is exactly the set of nodes on some path from S to v; on cyclic graphs
//! it is a superset of the simple-path set.

use super::Graph;
use crate::combinatorics::{subsets_between, subsets_up_to};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub fn reachable_from(graph: &Graph, seeds: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; graph.n()];
    let mut stack: Vec<usize> = Vec::new();
    for &s in seeds {
        if !seen[s] {
            seen[s] = true;
            stack.push(s);
        }
    }
    while let Some(u) = stack.pop() {
        for v in graph.out_neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// Nodes from which `target` is reachable (including `target`).
pub fn reaches(graph: &Graph, target: usize) -> Vec<bool> {
    let mut seen = vec![false; graph.n()];
    seen[target] = true;
    let mut stack = vec![target];
    while let Some(v) = stack.pop() {
        for &u in graph.in_neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen
}

pub fn relevance_set(graph: &Graph, seeds: &[usize], v: usize) -> Vec<usize> {
    let from = reachable_from(graph, seeds);
    let to = reaches(graph, v);
    (0..graph.n()).filter(|&u| from[u] && to[u]).collect()
}

/// `N_{S,u}` for every node `u`: how many non-seed targets `u` is relevant to.
pub fn relevance_counts(graph: &Graph, seeds: &[usize]) -> Vec<usize> {
    let backward: Vec<Vec<bool>> = (0..graph.n()).map(|v| reaches(graph, v)).collect();
    relevance_counts_with(graph, seeds, &backward)
}

fn relevance_counts_with(graph: &Graph, seeds: &[usize], backward: &[Vec<bool>]) -> Vec<usize> {
    let n = graph.n();
    let from = reachable_from(graph, seeds);
    let mut is_seed = vec![false; n];
    for &s in seeds {
        is_seed[s] = true;
    }
    let mut counts = vec![0; n];
    for v in (0..n).filter(|&v| !is_seed[v] && from[v]) {
        for u in 0..n {
            if from[u] && backward[v][u] {
                counts[u] += 1;
            }
        }
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMode {
    /// Maximum over every seed set with at most `K` nodes; `cap` bounds the
    /// number of seed sets enumerated.
    Exact { cap: f64 },
    /// The closed-form `(n - K) √n` upper bound.
    Bound,
}

impl GammaMode {
    pub const DEFAULT_CAP: f64 = 1e5;

    pub fn exact() -> Self {
        GammaMode::Exact { cap: Self::DEFAULT_CAP }
    }
}

/// `γ(G) = max_{|S| ≤ K} ‖N_S‖₂`.
pub fn gamma_diagnostic(graph: &Graph, k: usize, mode: GammaMode) -> Result<f64> {
    let n = graph.n();
    match mode {
        GammaMode::Bound => Ok((n.saturating_sub(k)) as f64 * (n as f64).sqrt()),
        GammaMode::Exact { cap } => {
            let required = subsets_up_to(n, k);
            if required > cap {
                return Err(Error::EnumerationTooLarge {
                    what: "seed sets",
                    required,
                    cap,
                });
            }
            let backward: Vec<Vec<bool>> = (0..n).map(|v| reaches(graph, v)).collect();
            let best = subsets_between(n, 1, k)
                .map(|s| {
                    relevance_counts_with(graph, &s, &backward)
                        .iter()
                        .map(|&c| (c * c) as f64)
                        .sum::<f64>()
                })
                .fold(0.0, f64::max);
            Ok(best.sqrt())
        }
    }
}
