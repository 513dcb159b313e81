//! Exact desk-scale checks of the bounded-smoothness inequality
//!
//! `|r(S,w′) − r(S,w)| ≤ E[Σ_{v∉S} Σ_{u∈V_{S,v}} Σ_{τ=τ₁(u)}^{τ₂(u)−1} |Σ_{e∈E_τ(u)} (w′(e) − w(e))|]`
//!
//! and of the per-node bound that ties it to the distilled updates. The
//! expectation is over thresholds under `w`, computed by enumerating
//! live-edge worlds; `τ₁`, `τ₂` use the true propagation diameter `D`
//! (longest simple path) rather than the operational `n − 1`.

use crate::diffusion::Model;
use crate::error::{Error, Result};
use crate::graph::{reachable_from, reaches, relevance_counts, Graph, WeightVector};
use crate::spread::{exact_spread, LiveEdgeWorlds};
use serde::{Deserialize, Serialize};

pub const GOM_TOLERANCE: f64 = 1e-9;

/// Bound on DFS steps for the simple-path searches.
pub const PATH_SEARCH_CAP: f64 = 1e7;

struct PathSearch<'g> {
    graph: &'g Graph,
    on_path: Vec<bool>,
    path: Vec<usize>,
    steps: f64,
}

impl<'g> PathSearch<'g> {
    fn new(graph: &'g Graph) -> Self {
        Self {
            graph,
            on_path: vec![false; graph.n()],
            path: Vec::new(),
            steps: 0.0,
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1.0;
        if self.steps > PATH_SEARCH_CAP {
            return Err(Error::EnumerationTooLarge {
                what: "simple-path search steps",
                required: self.steps,
                cap: PATH_SEARCH_CAP,
            });
        }
        Ok(())
    }

    /// Longest simple path (in edges) starting at `u`.
    fn longest_from(&mut self, u: usize) -> Result<usize> {
        self.tick()?;
        self.on_path[u] = true;
        let mut best = 0;
        let next: Vec<usize> = self.graph.out_neighbors(u).collect();
        for v in next {
            if !self.on_path[v] {
                best = best.max(1 + self.longest_from(v)?);
            }
        }
        self.on_path[u] = false;
        Ok(best)
    }

    /// Marks every node lying on a simple path from `u` to `target`.
    fn mark_paths(&mut self, u: usize, target: usize, marked: &mut [bool]) -> Result<()> {
        self.tick()?;
        self.on_path[u] = true;
        self.path.push(u);
        if u == target {
            for &x in &self.path {
                marked[x] = true;
            }
        } else {
            let next: Vec<usize> = self.graph.out_neighbors(u).collect();
            for v in next {
                if !self.on_path[v] {
                    self.mark_paths(v, target, marked)?;
                }
            }
        }
        self.path.pop();
        self.on_path[u] = false;
        Ok(())
    }
}

/// The propagation diameter `D`: number of edges on the longest simple path.
pub fn longest_simple_path(graph: &Graph) -> Result<usize> {
    if let Some(layers) = graph.topological_layers() {
        return Ok(dag_longest_path(graph, &layers));
    }
    let mut search = PathSearch::new(graph);
    let mut best = 0;
    for u in 0..graph.n() {
        best = best.max(search.longest_from(u)?);
    }
    Ok(best)
}

fn dag_longest_path(graph: &Graph, layers: &[Vec<usize>]) -> usize {
    let mut depth = vec![0usize; graph.n()];
    for layer in layers {
        for &v in layer {
            depth[v] = graph.in_neighbors(v).iter().map(|&u| depth[u] + 1).max().unwrap_or(0);
        }
    }
    depth.into_iter().max().unwrap_or(0)
}

/// `V_{S,v}` as the set of nodes on some simple path from a seed to `v`.
pub fn simple_path_relevance(graph: &Graph, seeds: &[usize], v: usize) -> Result<Vec<usize>> {
    let mut marked = vec![false; graph.n()];
    let mut search = PathSearch::new(graph);
    for &s in seeds {
        search.mark_paths(s, v, &mut marked)?;
    }
    Ok((0..graph.n()).filter(|&u| marked[u]).collect())
}

/// Relevance counts `N_{S,u}` from simple paths.
fn simple_path_counts(graph: &Graph, seeds: &[usize]) -> Result<Vec<usize>> {
    let n = graph.n();
    let from = reachable_from(graph, seeds);
    let mut counts = vec![0; n];
    for v in (0..n).filter(|&v| from[v] && !seeds.contains(&v)) {
        for u in simple_path_relevance(graph, seeds, v)? {
            counts[u] += 1;
        }
    }
    Ok(counts)
}

/// `Σ_{τ=τ₁(u)}^{τ₂(u)−1} |Σ_{e∈E_τ(u)} δ(e)|` for one world, together
/// with the span `τ₂ − τ₁` (zero when `u` never has an active in-neighbor).
fn observed_sum(graph: &Graph, delta: &[f64], times: &[Option<usize>], u: usize, diameter: usize) -> (f64, usize) {
    if times[u] == Some(0) {
        return (0.0, 0);
    }
    let never = diameter + 1;
    let ins = graph.in_edges(u);
    let tau1 = ins.clone().filter_map(|e| times[graph.source(e)]).min().unwrap_or(never);
    let tau2 = times[u].unwrap_or(never);
    let mut total = 0.0;
    for tau in tau1..tau2 {
        let s: f64 = ins
            .clone()
            .filter(|&e| matches!(times[graph.source(e)], Some(t) if t <= tau))
            .map(|e| delta[e])
            .sum();
        total += s.abs();
    }
    (total, tau2.saturating_sub(tau1))
}

fn differences(w: &WeightVector, w_prime: &WeightVector) -> Vec<f64> {
    w_prime.as_slice().iter().zip(w.as_slice()).map(|(a, b)| a - b).collect()
}

fn check_lengths(graph: &Graph, w: &WeightVector, w_prime: &WeightVector) -> Result<()> {
    for x in [w, w_prime] {
        if x.as_slice().len() != graph.m() {
            return Err(Error::WeightLengthMismatch {
                expected: graph.m(),
                actual: x.as_slice().len(),
            });
        }
    }
    Ok(())
}

/// Per-node contributions `N_{S,u} · E[Σ_τ |…|]`; their sum is the right-hand side.
fn rhs_terms(
    graph: &Graph,
    w: &WeightVector,
    w_prime: &WeightVector,
    seeds: &[usize],
    counts: &[usize],
    diameter: usize,
    cap: f64,
) -> Result<Vec<f64>> {
    check_lengths(graph, w, w_prime)?;
    let worlds = LiveEdgeWorlds::new(Model::Lt, graph, w, seeds, cap)?;
    let delta = differences(w, w_prime);
    Ok(worlds.expectation(graph.n(), |times, out| {
        for u in (0..graph.n()).filter(|&u| counts[u] > 0) {
            out[u] = counts[u] as f64 * observed_sum(graph, &delta, times, u, diameter).0;
        }
    }))
}

/// The right-hand side, with `V_{S,v}` taken as (reachable from S) ∩
/// (reaches v). On cyclic graphs this can only enlarge it.
pub fn gom_rhs_exact(graph: &Graph, w: &WeightVector, w_prime: &WeightVector, seeds: &[usize], cap: f64) -> Result<f64> {
    let diameter = longest_simple_path(graph)?;
    let counts = relevance_counts(graph, seeds);
    Ok(rhs_terms(graph, w, w_prime, seeds, &counts, diameter, cap)?.iter().sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GomReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    /// `D` used for `τ₁`/`τ₂` of nodes that never activate.
    pub diameter: usize,
    /// `N_{S,u} · E[Σ_τ |…|]` per node `u`.
    pub per_node: Vec<f64>,
    /// False when the graph is cyclic and the reachability relaxation of
    /// some `V_{S,v}` is strictly larger than its simple-path version.
    pub relevance_exact: bool,
    /// Right-hand side with simple-path relevance sets, when they differ.
    pub rhs_simple_paths: Option<f64>,
}

pub fn verify_gom(graph: &Graph, w: &WeightVector, w_prime: &WeightVector, seeds: &[usize], cap: f64) -> Result<GomReport> {
    let diameter = longest_simple_path(graph)?;
    let counts = relevance_counts(graph, seeds);
    let per_node = rhs_terms(graph, w, w_prime, seeds, &counts, diameter, cap)?;
    let rhs: f64 = per_node.iter().sum();
    let lhs = (exact_spread(Model::Lt, graph, w_prime, seeds, cap)? - exact_spread(Model::Lt, graph, w, seeds, cap)?).abs();
    let mut relevance_exact = true;
    let mut rhs_simple_paths = None;
    if !graph.is_acyclic() {
        let simple = simple_path_counts(graph, seeds)?;
        if simple != counts {
            relevance_exact = false;
            rhs_simple_paths = Some(rhs_terms(graph, w, w_prime, seeds, &simple, diameter, cap)?.iter().sum());
        }
    }
    let slack = rhs - lhs;
    Ok(GomReport {
        lhs,
        rhs,
        slack,
        holds: slack >= -GOM_TOLERANCE,
        diameter,
        per_node,
        relevance_exact,
        rhs_simple_paths,
    })
}

/// Worst case, over live-edge worlds and nodes, of
/// `c · (1/D_u) Σ_τ |…| − Σ_τ |…|` for `c = D` and `c = D + 1`, where the
/// average over τ is the exact expectation of the distilled update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateBoundReport {
    pub diameter: usize,
    /// Largest `D_u = τ₂(u) − τ₁(u)` seen in any world.
    pub max_span: usize,
    pub worst_slack: f64,
    pub holds: bool,
    /// Worst slack with the constant `D + 1`, which covers nodes that see
    /// a seed in-neighbor at `τ = 0` and never activate (`D_u = D + 1`).
    pub worst_slack_corrected: f64,
    pub holds_corrected: bool,
}

pub fn verify_update_bound(
    graph: &Graph,
    w: &WeightVector,
    w_prime: &WeightVector,
    seeds: &[usize],
    cap: f64,
) -> Result<UpdateBoundReport> {
    check_lengths(graph, w, w_prime)?;
    let diameter = longest_simple_path(graph)?;
    let worlds = LiveEdgeWorlds::new(Model::Lt, graph, w, seeds, cap)?;
    let delta = differences(w, w_prime);
    let worst = |factor: f64| {
        worlds.minimum(|times| {
            (0..graph.n())
                .map(|u| {
                    let (total, span) = observed_sum(graph, &delta, times, u, diameter);
                    if span == 0 {
                        0.0
                    } else {
                        factor * total / span as f64 - total
                    }
                })
                .fold(0.0, f64::min)
        })
    };
    let worst_slack = worst(diameter as f64);
    let worst_slack_corrected = worst(diameter as f64 + 1.0);
    let max_span = -worlds.minimum(|times| {
        -((0..graph.n())
            .map(|u| observed_sum(graph, &delta, times, u, diameter).1)
            .max()
            .unwrap_or(0) as f64)
    });
    Ok(UpdateBoundReport {
        diameter,
        max_span: max_span.max(0.0) as usize,
        worst_slack,
        holds: worst_slack >= -GOM_TOLERANCE,
        worst_slack_corrected,
        holds_corrected: worst_slack_corrected >= -GOM_TOLERANCE,
    })
}

/// Whether the reachability relaxation is tight for every target.
pub fn relevance_is_exact(graph: &Graph, seeds: &[usize]) -> Result<bool> {
    if graph.is_acyclic() {
        return Ok(true);
    }
    let from = reachable_from(graph, seeds);
    for v in (0..graph.n()).filter(|&v| from[v]) {
        let to = reaches(graph, v);
        let relaxed: Vec<usize> = (0..graph.n()).filter(|&u| from[u] && to[u]).collect();
        if relaxed != simple_path_relevance(graph, seeds, v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, build_graph_with_nodes};
    use crate::spread::LIVE_EDGE_CAP;

    fn weights(g: &Graph, v: &[f64]) -> WeightVector {
        WeightVector::new(g, v.to_vec()).unwrap()
    }

    #[test]
    fn diameters() {
        let (g, _) = build_graph(&[(0, 1, 0.5), (1, 2, 0.5), (0, 2, 0.1)]).unwrap();
        assert_eq!(longest_simple_path(&g).unwrap(), 2);
        let (g, _) = build_graph(&[(0, 1, 0.5), (1, 2, 0.5), (2, 0, 0.5), (2, 3, 0.5)]).unwrap();
        assert_eq!(longest_simple_path(&g).unwrap(), 3);
        let (g, _) = build_graph_with_nodes(3, &[]).unwrap();
        assert_eq!(longest_simple_path(&g).unwrap(), 0);
    }

    #[test]
    fn single_edge_case() {
        let (g, w) = build_graph(&[(0, 1, 0.2)]).unwrap();
        let wp = weights(&g, &[0.5]);
        let rhs = gom_rhs_exact(&g, &w, &wp, &[0], LIVE_EDGE_CAP).unwrap();
        assert!((rhs - (0.2 * 0.3 + 0.8 * 0.6)).abs() < 1e-12);
        let r = verify_gom(&g, &w, &wp, &[0], LIVE_EDGE_CAP).unwrap();
        assert!((r.lhs - 0.3).abs() < 1e-12);
        assert!((r.rhs - 0.54).abs() < 1e-12);
        assert!(r.holds && r.relevance_exact);
        assert_eq!(r.diameter, 1);
    }

    #[test]
    fn trivial_cases() {
        let (g, w) = build_graph(&[(0, 1, 0.2), (1, 2, 0.7)]).unwrap();
        let r = verify_gom(&g, &w, &w, &[0], LIVE_EDGE_CAP).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        let wp = weights(&g, &[0.9, 0.1]);
        let r = verify_gom(&g, &w, &wp, &[0, 1, 2], LIVE_EDGE_CAP).unwrap();
        assert_eq!(r.rhs, 0.0);
        assert!(r.holds);
    }

    #[test]
    fn cyclic_relaxation_is_flagged() {
        // 0 -> 1 -> 2 -> 1: node 2 is not on a simple path from 0 to 1
        let (g, w) = build_graph(&[(0, 1, 0.4), (1, 2, 0.5), (2, 1, 0.3)]).unwrap();
        assert_eq!(simple_path_relevance(&g, &[0], 1).unwrap(), vec![0, 1]);
        assert!(!relevance_is_exact(&g, &[0]).unwrap());
        let wp = weights(&g, &[0.1, 0.9, 0.6]);
        let r = verify_gom(&g, &w, &wp, &[0], LIVE_EDGE_CAP).unwrap();
        assert!(!r.relevance_exact);
        assert!(r.rhs >= r.rhs_simple_paths.unwrap());
        assert!(r.holds);
    }

    #[test]
    fn update_bound_equality_and_off_by_one() {
        // chain 0 -> 1 -> 2, seed 1: node 2 hears from τ = 0 and may fail,
        // giving D_u = D + 1 = 3 terms where the stated bound allows D = 2.
        let (g, w) = build_graph(&[(0, 1, 0.5), (1, 2, 0.5)]).unwrap();
        let wp = weights(&g, &[0.5, 0.8]);
        let r = verify_update_bound(&g, &w, &wp, &[1], LIVE_EDGE_CAP).unwrap();
        assert_eq!(r.diameter, 2);
        assert_eq!(r.max_span, 3);
        assert!(!r.holds);
        assert!((r.worst_slack - (2.0 * 0.3 - 3.0 * 0.3)).abs() < 1e-12);
        assert!(r.holds_corrected);
        assert!(r.worst_slack_corrected.abs() < 1e-12);

        // seed 0: node 1 may span D + 1 but its weight is unchanged; node 2
        // first hears at τ = 1, so its span is at most D
        let r = verify_update_bound(&g, &w, &wp, &[0], LIVE_EDGE_CAP).unwrap();
        assert!(r.holds, "{r:?}");
    }
}
