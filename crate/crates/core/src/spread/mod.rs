//! Influence spread: exact live-edge enumeration, Monte-Carlo estimation,
//! and the offline influence-maximization oracles built on them.

mod greedy;
mod live_edge;

pub use greedy::{greedy_lazy, greedy_naive, TIE_TOLERANCE};
pub use live_edge::{exact_marginals, exact_spread, exact_spread_lt, LiveEdgeWorlds, LIVE_EDGE_CAP};

use crate::combinatorics::{binomial, Combinations};
use crate::diffusion::{diffuse, Model};
use crate::error::{Error, Result};
use crate::graph::{Graph, WeightVector};
use crate::rng::{Purpose, SeedStream};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default bound on the number of seed sets an exhaustive search visits.
pub const SEED_SET_CAP: f64 = 1e5;

pub const DEFAULT_MC_SIMS: usize = 10_000;

const MC_CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub sims: usize,
}

/// Monte-Carlo spread estimate. Simulations are split into fixed chunks,
/// each with its own stream derived from one draw of `rng`, so the result
/// depends only on `rng` and not on scheduling.
pub fn mc_spread_model(
    model: Model,
    graph: &Graph,
    weights: &WeightVector,
    seeds: &[usize],
    sims: usize,
    rng: &mut impl Rng,
) -> SpreadEstimate {
    assert!(sims >= 1, "at least one simulation is required");
    let base = SeedStream::new(rng.gen());
    let chunks = sims.div_ceil(MC_CHUNK);
    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = base.child(c as u64).rng();
            let len = MC_CHUNK.min(sims - c * MC_CHUNK);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..len {
                let x = diffuse(model, graph, weights, seeds, &mut r).active_count() as f64;
                s += x;
                s2 += x * x;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let k = sims as f64;
    let mean = s / k;
    let var = if sims > 1 {
        ((s2 - k * mean * mean) / (k - 1.0)).max(0.0)
    } else {
        0.0
    };
    SpreadEstimate {
        mean,
        std_error: (var / k).sqrt(),
        sims,
    }
}

pub fn mc_spread(graph: &Graph, weights: &WeightVector, seeds: &[usize], sims: usize, rng: &mut impl Rng) -> SpreadEstimate {
    mc_spread_model(Model::Lt, graph, weights, seeds, sims, rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum EvalMode {
    Exact {
        #[serde(default = "default_live_edge_cap")]
        cap: f64,
    },
    /// Fixed number of simulations; the stream for a seed set is derived
    /// from `seed` and the set itself, so repeated queries agree.
    MonteCarlo {
        #[serde(default = "default_sims")]
        sims: usize,
        #[serde(default)]
        seed: u64,
    },
}

fn default_live_edge_cap() -> f64 {
    LIVE_EDGE_CAP
}

fn default_sims() -> usize {
    DEFAULT_MC_SIMS
}

impl Default for EvalMode {
    fn default() -> Self {
        EvalMode::Exact { cap: LIVE_EDGE_CAP }
    }
}

/// Injectable spread evaluator `S ↦ r(S, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadEvaluator {
    pub model: Model,
    pub mode: EvalMode,
}

impl SpreadEvaluator {
    pub fn exact(model: Model) -> Self {
        Self {
            model,
            mode: EvalMode::default(),
        }
    }

    pub fn monte_carlo(model: Model, sims: usize, seed: u64) -> Self {
        Self {
            model,
            mode: EvalMode::MonteCarlo { sims, seed },
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.mode, EvalMode::Exact { .. })
    }

    pub fn evaluate(&self, graph: &Graph, weights: &WeightVector, seeds: &[usize]) -> Result<f64> {
        match self.mode {
            EvalMode::Exact { cap } => exact_spread(self.model, graph, weights, seeds, cap),
            EvalMode::MonteCarlo { sims, seed } => {
                let mut sorted = seeds.to_vec();
                sorted.sort_unstable();
                let stream = sorted
                    .iter()
                    .fold(SeedStream::new(seed).purpose(Purpose::Evaluation), |s, &u| s.child(u as u64));
                let mut rng = stream.rng();
                Ok(mc_spread_model(self.model, graph, weights, seeds, sims, &mut rng).mean)
            }
        }
    }
}

/// Output of an offline IM oracle, tagged with its `(α, β)` guarantee.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub seeds: Vec<usize>,
    pub value: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl OracleResult {
    /// `η = α · β`, the factor regret is scaled by.
    pub fn eta(&self) -> f64 {
        self.alpha * self.beta
    }
}

/// An offline `(α, β)`-approximate influence-maximization oracle.
pub trait ImOracle: Sync {
    fn solve(&self, graph: &Graph, weights: &WeightVector, k: usize) -> Result<OracleResult>;

    /// The `α` this oracle guarantees.
    fn alpha(&self) -> f64 {
        1.0
    }
}

pub const GREEDY_ALPHA: f64 = 1.0 - 1.0 / std::f64::consts::E;

/// Greedy seed selection with lazy evaluation.
pub fn greedy_im(graph: &Graph, weights: &WeightVector, k: usize, value: &SpreadEvaluator) -> Result<OracleResult> {
    let (seeds, v) = greedy_lazy(graph.n(), k, |s| value.evaluate(graph, weights, s))?;
    Ok(OracleResult {
        seeds,
        value: v,
        alpha: GREEDY_ALPHA,
        beta: 1.0,
    })
}

/// Exhaustive search over seed sets of size `min(k, n)` (spread is
/// monotone, so smaller sets never do better). Ties go to the
/// lexicographically first set.
pub fn exact_opt_with(
    model: Model,
    graph: &Graph,
    weights: &WeightVector,
    k: usize,
    live_edge_cap: f64,
    seed_set_cap: f64,
) -> Result<OracleResult> {
    let n = graph.n();
    let k = k.min(n);
    let required = binomial(n, k);
    if required > seed_set_cap {
        return Err(Error::EnumerationTooLarge {
            what: "seed sets",
            required,
            cap: seed_set_cap,
        });
    }
    let sets: Vec<Vec<usize>> = Combinations::new(n, k).collect();
    let values: Vec<f64> = sets
        .par_iter()
        .map(|s| exact_spread(model, graph, weights, s, live_edge_cap))
        .collect::<Result<_>>()?;
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let i = values.iter().position(|&v| v >= best - TIE_TOLERANCE).unwrap();
    Ok(OracleResult {
        seeds: sets[i].clone(),
        value: values[i],
        alpha: 1.0,
        beta: 1.0,
    })
}

/// The exact `(1, 1)` oracle under LT with default caps.
pub fn exact_opt(graph: &Graph, weights: &WeightVector, k: usize) -> Result<OracleResult> {
    exact_opt_with(Model::Lt, graph, weights, k, LIVE_EDGE_CAP, SEED_SET_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactImOracle {
    pub model: Model,
    pub live_edge_cap: f64,
    pub seed_set_cap: f64,
}

impl ExactImOracle {
    pub fn new(model: Model) -> Self {
        Self {
            model,
            live_edge_cap: LIVE_EDGE_CAP,
            seed_set_cap: SEED_SET_CAP,
        }
    }
}

impl ImOracle for ExactImOracle {
    fn solve(&self, graph: &Graph, weights: &WeightVector, k: usize) -> Result<OracleResult> {
        exact_opt_with(self.model, graph, weights, k, self.live_edge_cap, self.seed_set_cap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreedyImOracle {
    pub evaluator: SpreadEvaluator,
}

impl ImOracle for GreedyImOracle {
    fn solve(&self, graph: &Graph, weights: &WeightVector, k: usize) -> Result<OracleResult> {
        greedy_im(graph, weights, k, &self.evaluator)
    }

    fn alpha(&self) -> f64 {
        GREEDY_ALPHA
    }
}

/// Oracle selection for configs and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ImOracleKind {
    #[default]
    Exact,
    Greedy {
        #[serde(default)]
        mode: EvalMode,
    },
}

/// An [`ImOracleKind`] bound to a diffusion model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfiguredImOracle {
    pub model: Model,
    pub kind: ImOracleKind,
}

impl ImOracle for ConfiguredImOracle {
    fn solve(&self, graph: &Graph, weights: &WeightVector, k: usize) -> Result<OracleResult> {
        match self.kind {
            ImOracleKind::Exact => ExactImOracle::new(self.model).solve(graph, weights, k),
            ImOracleKind::Greedy { mode } => GreedyImOracle {
                evaluator: SpreadEvaluator { model: self.model, mode },
            }
            .solve(graph, weights, k),
        }
    }

    fn alpha(&self) -> f64 {
        match self.kind {
            ImOracleKind::Exact => 1.0,
            ImOracleKind::Greedy { .. } => GREEDY_ALPHA,
        }
    }
}
