//! Node-level feedback: `τ₁(v)`, `τ₂(v)`, the observed in-edge groups
//! `E_τ(v)`, and the randomized distilled update built from them.

use super::DiffusionTrace;
use crate::graph::{EdgeId, Graph};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::ops::Range;

/// What one cascade tells us about the in-weights of a single node.
///
/// `τ₁` is the first step at which `v` has an active in-neighbor and `τ₂`
/// the step at which `v` activates; both are `horizon + 1` when the event
/// never happens. Seeds are active from the start and carry
/// `τ₁ = τ₂ = 0`, so they never yield an observation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeObservation {
    pub tau1: usize,
    pub tau2: usize,
    pub activated: bool,
    pub seed: bool,
    /// Activation time of each in-neighbor, in `N(v)` order.
    in_times: Vec<Option<usize>>,
}

impl NodeObservation {
    /// The τ values an update may be drawn from: `τ₁ ..= τ₂ - 1`.
    pub fn tau_range(&self) -> Range<usize> {
        self.tau1..self.tau2.max(self.tau1)
    }

    pub fn has_observation(&self) -> bool {
        !self.tau_range().is_empty()
    }

    /// Positions within `N(v)` of the in-neighbors active by `τ`, i.e. `E_τ(v)`.
    pub fn edge_positions(&self, tau: usize) -> Vec<usize> {
        self.in_times
            .iter()
            .enumerate()
            .filter(|(_, t)| matches!(t, Some(t) if *t <= tau))
            .map(|(i, _)| i)
            .collect()
    }

    /// `χ(E_τ(v))`.
    pub fn indicator(&self, tau: usize) -> Vec<f64> {
        self.in_times
            .iter()
            .map(|t| match t {
                Some(t) if *t <= tau => 1.0,
                _ => 0.0,
            })
            .collect()
    }

    /// The update pair for a given τ: label 1 only for the group that
    /// actually activated the node.
    pub fn pair_at(&self, tau: usize) -> ObservationPair {
        ObservationPair {
            tau,
            positions: self.edge_positions(tau),
            label: self.activated && tau + 1 == self.tau2,
        }
    }
}

/// `(A_v, y_v)` with `A_v` given by its support positions inside `N(v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservationPair {
    pub tau: usize,
    pub positions: Vec<usize>,
    pub label: bool,
}

impl ObservationPair {
    pub fn indicator(&self, dim: usize) -> Vec<f64> {
        let mut a = vec![0.0; dim];
        for &i in &self.positions {
            a[i] = 1.0;
        }
        a
    }

    pub fn y(&self) -> f64 {
        if self.label {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeFeedback {
    pub horizon: usize,
    pub nodes: Vec<NodeObservation>,
}

impl NodeFeedback {
    pub fn node(&self, v: usize) -> &NodeObservation {
        &self.nodes[v]
    }

    /// `E_τ(v)` as global edge ids.
    pub fn edge_set(&self, graph: &Graph, v: usize, tau: usize) -> Vec<EdgeId> {
        let base = graph.in_edges(v).start;
        self.nodes[v].edge_positions(tau).into_iter().map(|i| base + i).collect()
    }

    /// `E_τ(v)` for every τ in `τ₁ ..= τ₂ - 1`.
    pub fn edge_sets(&self, graph: &Graph, v: usize) -> Vec<Vec<EdgeId>> {
        self.nodes[v].tau_range().map(|tau| self.edge_set(graph, v, tau)).collect()
    }
}

pub fn extract_feedback(trace: &DiffusionTrace, graph: &Graph) -> NodeFeedback {
    let never = trace.horizon() + 1;
    let nodes = (0..graph.n())
        .map(|v| {
            let in_times: Vec<Option<usize>> = graph.in_neighbors(v).iter().map(|&u| trace.activation_time(u)).collect();
            match trace.activation_time(v) {
                Some(0) => NodeObservation {
                    tau1: 0,
                    tau2: 0,
                    activated: true,
                    seed: true,
                    in_times,
                },
                time => NodeObservation {
                    tau1: in_times.iter().flatten().copied().min().unwrap_or(never),
                    tau2: time.unwrap_or(never),
                    activated: time.is_some(),
                    seed: false,
                    in_times,
                },
            }
        })
        .collect();
    NodeFeedback {
        horizon: trace.horizon(),
        nodes,
    }
}

/// Draws one τ uniformly from each node's range and emits the matching
/// observation; nodes that never had an active in-neighbor emit nothing.
pub fn distill_update(feedback: &NodeFeedback, rng: &mut impl Rng) -> Vec<Option<ObservationPair>> {
    feedback
        .nodes
        .iter()
        .map(|obs| {
            let range = obs.tau_range();
            if range.is_empty() {
                None
            } else {
                Some(obs.pair_at(rng.gen_range(range)))
            }
        })
        .collect()
}
