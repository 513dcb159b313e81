//! Cascade engines (linear threshold and independent cascade) and the
//! node-level feedback extracted from a cascade.

mod feedback;

pub use feedback::{distill_update, extract_feedback, NodeFeedback, NodeObservation, ObservationPair};

use crate::error::{Error, Result};
use crate::graph::{Graph, WeightVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Lt,
    Ic,
}

/// Per-node activation thresholds θ_v ∈ [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdVector(Vec<f64>);

impl ThresholdVector {
    pub fn new(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|t| (0.0..=1.0).contains(t)));
        Self(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// i.i.d. uniform thresholds, one per node.
pub fn sample_thresholds(graph: &Graph, rng: &mut impl Rng) -> ThresholdVector {
    ThresholdVector((0..graph.n()).map(|_| rng.gen::<f64>()).collect())
}

/// Operational horizon used by the online learner: a cascade on `n` nodes
/// reaches its fixpoint within `n - 1` steps.
pub fn operational_horizon(graph: &Graph) -> usize {
    graph.n().saturating_sub(1)
}

/// The nested activation sets `S_0 ⊆ S_1 ⊆ ...` of one cascade, stored as
/// per-node activation times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffusionTrace {
    model: Model,
    horizon: usize,
    activation_time: Vec<Option<usize>>,
    steps: usize,
}

impl DiffusionTrace {
    /// Builds a trace from activation times (seeds have time 0). Times
    /// must not skip a step and must not exceed `horizon`.
    pub fn from_activation_times(model: Model, horizon: usize, activation_time: Vec<Option<usize>>) -> Result<Self> {
        let steps = activation_time.iter().flatten().copied().max().unwrap_or(0);
        if steps > horizon {
            return Err(Error::InvalidConfig(format!(
                "activation time {steps} exceeds horizon {horizon}"
            )));
        }
        for tau in 0..=steps {
            if !activation_time.contains(&Some(tau)) {
                return Err(Error::InvalidConfig(format!("no activation at time {tau}")));
            }
        }
        Ok(Self {
            model,
            horizon,
            activation_time,
            steps,
        })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    /// The horizon `D_op` the cascade ran under.
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn n(&self) -> usize {
        self.activation_time.len()
    }

    /// Number of sets in the trace: `S_0, ..., S_{len-1}`, ending at the
    /// first fixpoint.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn activation_time(&self, v: usize) -> Option<usize> {
        self.activation_time[v]
    }

    pub fn activation_times(&self) -> &[Option<usize>] {
        &self.activation_time
    }

    pub fn is_active(&self, v: usize) -> bool {
        self.activation_time[v].is_some()
    }

    pub fn seeds(&self) -> Vec<usize> {
        self.set_at(0)
    }

    pub fn active_count(&self) -> usize {
        self.activation_time.iter().filter(|t| t.is_some()).count()
    }

    /// `S_τ`; for `τ` past the fixpoint this is the final set.
    pub fn set_at(&self, tau: usize) -> Vec<usize> {
        (0..self.n())
            .filter(|&v| matches!(self.activation_time[v], Some(t) if t <= tau))
            .collect()
    }

    /// Newly activated nodes at step `τ`.
    pub fn activated_at(&self, tau: usize) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.activation_time[v] == Some(tau)).collect()
    }

    pub fn sets(&self) -> Vec<Vec<usize>> {
        (0..self.len()).map(|tau| self.set_at(tau)).collect()
    }
}

fn initial_times(n: usize, seeds: &[usize]) -> (Vec<Option<usize>>, Vec<usize>) {
    let mut time = vec![None; n];
    let mut frontier = Vec::with_capacity(seeds.len());
    for &s in seeds {
        if time[s].is_none() {
            time[s] = Some(0);
            frontier.push(s);
        }
    }
    frontier.sort_unstable();
    (time, frontier)
}

/// Linear threshold cascade: an inactive `v` activates at `τ + 1` when the
/// weights from its in-neighbors active by `τ` sum to at least `θ_v`.
pub fn diffuse_lt(graph: &Graph, weights: &WeightVector, seeds: &[usize], thresholds: &ThresholdVector) -> DiffusionTrace {
    let n = graph.n();
    let horizon = operational_horizon(graph);
    let theta = thresholds.as_slice();
    let (mut time, mut frontier) = initial_times(n, seeds);
    let mut inflow = vec![0.0; n];
    let mut tau = 0;
    let mut candidates = Vec::new();
    while !frontier.is_empty() && tau < horizon {
        candidates.clear();
        for &u in &frontier {
            for &e in graph.out_edges(u) {
                let v = graph.target(e);
                if time[v].is_none() {
                    inflow[v] += weights.get(e);
                    candidates.push(v);
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        frontier.clear();
        for &v in &candidates {
            if inflow[v] >= theta[v] {
                time[v] = Some(tau + 1);
                frontier.push(v);
            }
        }
        if !frontier.is_empty() {
            tau += 1;
        }
    }
    DiffusionTrace {
        model: Model::Lt,
        horizon,
        activation_time: time,
        steps: tau,
    }
}

/// Independent cascade: each edge out of a newly active node is tried once,
/// succeeding with probability equal to its weight.
pub fn diffuse_ic(graph: &Graph, weights: &WeightVector, seeds: &[usize], rng: &mut impl Rng) -> DiffusionTrace {
    let n = graph.n();
    let horizon = operational_horizon(graph);
    let (mut time, mut frontier) = initial_times(n, seeds);
    let mut tau = 0;
    while !frontier.is_empty() && tau < horizon {
        let mut next = Vec::new();
        for &u in &frontier {
            for &e in graph.out_edges(u) {
                let v = graph.target(e);
                if time[v].is_none() && rng.gen::<f64>() < weights.get(e) {
                    time[v] = Some(tau + 1);
                    next.push(v);
                }
            }
        }
        next.sort_unstable();
        frontier = next;
        if !frontier.is_empty() {
            tau += 1;
        }
    }
    DiffusionTrace {
        model: Model::Ic,
        horizon,
        activation_time: time,
        steps: tau,
    }
}

/// Runs one cascade of the given model, drawing whatever randomness the
/// model needs from `rng`.
pub fn diffuse(model: Model, graph: &Graph, weights: &WeightVector, seeds: &[usize], rng: &mut impl Rng) -> DiffusionTrace {
    match model {
        Model::Lt => {
            let theta = sample_thresholds(graph, rng);
            diffuse_lt(graph, weights, seeds, &theta)
        }
        Model::Ic => diffuse_ic(graph, weights, seeds, rng),
    }
}
