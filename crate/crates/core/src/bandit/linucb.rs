use super::{RegretRecord, RegretTracker};
use crate::diffusion::{diffuse_lt, distill_update, extract_feedback, sample_thresholds, DiffusionTrace, ObservationPair};
use crate::error::{Error, Result};
use crate::graph::{Graph, WeightVector};
use crate::rng::{Purpose, SeedStream};
use crate::spread::{OracleResult, SpreadEvaluator};
use crate::wcim::{ConfidenceSet, NodeEllipsoid, PairOracle, PairResult};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// `√(N ln(1 + tN) + 2 ln(1/δ)) + √N`.
pub fn confidence_radius(dim: usize, t: usize, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidDelta(delta));
    }
    let n = dim as f64;
    Ok((n * (1.0 + t as f64 * n).ln() + 2.0 * (1.0 / delta).ln()).sqrt() + n.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RadiusMode {
    /// `N = |N(v)|` for each node.
    #[default]
    PerNode,
    /// `N = n` for every node.
    Global,
    /// A constant radius.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinUcbConfig {
    pub k: usize,
    /// Failure probability; `None` means `1/(n√T)`.
    pub delta: Option<f64>,
    #[serde(default)]
    pub radius: RadiusMode,
}

impl LinUcbConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            delta: None,
            radius: RadiusMode::PerNode,
        }
    }

    pub fn resolved_delta(&self, n: usize, horizon: usize) -> f64 {
        self.delta
            .unwrap_or_else(|| 1.0 / (n.max(1) as f64 * (horizon.max(1) as f64).sqrt()))
    }
}

#[derive(Debug, Clone, PartialEq)]
struct NodeState {
    gramian: DMatrix<f64>,
    moment: DVector<f64>,
    inverse: DMatrix<f64>,
}

/// Per-node regression state `M_v`, `b_v` and the cached `M_v⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinUcbState {
    nodes: Vec<NodeState>,
    /// Rounds completed.
    t: usize,
    config: LinUcbConfig,
    delta: f64,
}

impl LinUcbState {
    pub fn new(graph: &Graph, config: LinUcbConfig, horizon: usize) -> Result<Self> {
        let delta = config.resolved_delta(graph.n(), horizon);
        confidence_radius(1, 0, delta)?;
        let nodes = (0..graph.n())
            .map(|v| {
                let d = graph.in_degree(v);
                NodeState {
                    gramian: DMatrix::identity(d, d),
                    moment: DVector::zeros(d),
                    inverse: DMatrix::identity(d, d),
                }
            })
            .collect();
        Ok(Self {
            nodes,
            t: 0,
            config,
            delta,
        })
    }

    pub fn rounds(&self) -> usize {
        self.t
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gramian(&self, v: usize) -> &DMatrix<f64> {
        &self.nodes[v].gramian
    }

    pub fn moment(&self, v: usize) -> &DVector<f64> {
        &self.nodes[v].moment
    }

    pub fn cached_inverse(&self, v: usize) -> &DMatrix<f64> {
        &self.nodes[v].inverse
    }

    /// `ŵ_v = M_v⁻¹ b_v`.
    pub fn estimate(&self, v: usize) -> DVector<f64> {
        &self.nodes[v].inverse * &self.nodes[v].moment
    }

    /// Radius used in round `t` (1-based).
    pub fn radius(&self, graph: &Graph, v: usize, t: usize) -> f64 {
        match self.config.radius {
            RadiusMode::PerNode => confidence_radius(graph.in_degree(v), t, self.delta).expect("delta validated"),
            RadiusMode::Global => confidence_radius(graph.n(), t, self.delta).expect("delta validated"),
            RadiusMode::Fixed(r) => r,
        }
    }

    /// Replaces every `b_v` so that `ŵ_v` equals the given weights.
    pub fn inject_estimate(&mut self, graph: &Graph, weights: &WeightVector) {
        for (v, s) in self.nodes.iter_mut().enumerate() {
            let w = DVector::from_column_slice(weights.node(graph, v));
            s.moment = &s.gramian * w;
        }
    }

    /// `C_t` for the next round.
    pub fn confidence_set(&self, graph: &Graph) -> ConfidenceSet {
        let t = self.t + 1;
        let ellipsoids = (0..graph.n())
            .filter(|&v| graph.in_degree(v) > 0)
            .map(|v| {
                let s = &self.nodes[v];
                NodeEllipsoid::from_cached(
                    v,
                    s.gramian.clone(),
                    s.moment.clone(),
                    s.inverse.clone(),
                    self.radius(graph, v, t),
                )
            })
            .collect();
        ConfidenceSet::new(graph, ellipsoids).expect("one ellipsoid per node with in-edges")
    }

    /// `M ← M + aaᵀ`, `b ← b + y a`, with a Sherman–Morrison update of `M⁻¹`.
    pub fn update(&mut self, v: usize, pair: &ObservationPair) {
        let s = &mut self.nodes[v];
        let a = DVector::from_vec(pair.indicator(s.moment.len()));
        s.gramian += &a * a.transpose();
        s.moment += &a * pair.y();
        let ma = &s.inverse * &a;
        let denom = 1.0 + a.dot(&ma);
        s.inverse -= (&ma * ma.transpose()) / denom;
    }
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub pair: PairResult,
    pub trace: DiffusionTrace,
    /// Nodes whose confidence ellipsoid for this round excluded the true
    /// weights.
    pub violations: Vec<usize>,
    /// The distilled observation of every node, if any.
    pub pairs: Vec<Option<ObservationPair>>,
}

impl StepOutcome {
    pub fn updates(&self) -> usize {
        self.pairs.iter().flatten().count()
    }
}

/// One round: build `C_t`, ask the PairOracle, run a cascade with fresh
/// thresholds, distill one observation per node and update.
pub fn step(
    state: &mut LinUcbState,
    graph: &Graph,
    w_true: &WeightVector,
    oracle: &impl PairOracle,
    stream: SeedStream,
) -> Result<StepOutcome> {
    let t = state.t + 1;
    let set = state.confidence_set(graph);
    let violations = set
        .iter()
        .filter(|e| e.distance(w_true.node(graph, e.node())) > e.rho())
        .map(|e| e.node())
        .collect();
    let pair = oracle.solve(graph, &set, state.config.k)?;
    let theta = sample_thresholds(graph, &mut stream.round_rng(t as u64, Purpose::Thresholds));
    let trace = diffuse_lt(graph, w_true, &pair.seeds, &theta);
    let feedback = extract_feedback(&trace, graph);
    let pairs = distill_update(&feedback, &mut stream.round_rng(t as u64, Purpose::Distill));
    for (v, p) in pairs.iter().enumerate() {
        if let Some(p) = p {
            state.update(v, p);
        }
    }
    state.t = t;
    Ok(StepOutcome {
        pair,
        trace,
        violations,
        pairs,
    })
}

/// Runs `horizon` rounds from a fresh state, recording η-scaled regret
/// against `baseline`.
#[allow(clippy::too_many_arguments)]
pub fn run(
    graph: &Graph,
    w_true: &WeightVector,
    config: LinUcbConfig,
    horizon: usize,
    oracle: &impl PairOracle,
    stream: SeedStream,
    baseline: &OracleResult,
    evaluator: SpreadEvaluator,
    timing: bool,
) -> Result<Vec<RegretRecord>> {
    let mut state = LinUcbState::new(graph, config, horizon)?;
    let eta_opt = oracle.eta(graph, config.k) * baseline.value;
    let mut tracker = RegretTracker::new(graph, w_true, evaluator, eta_opt, timing);
    for t in 1..=horizon {
        let out = step(&mut state, graph, w_true, oracle, stream)?;
        tracker.record(t, &out.pair.seeds)?;
    }
    Ok(tracker.records)
}
