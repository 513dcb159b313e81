use super::{RegretRecord, RegretTracker};
use crate::combinatorics::{subsets_between, subsets_up_to};
use crate::diffusion::{diffuse, Model};
use crate::error::{Error, Result};
use crate::graph::{Graph, WeightVector};
use crate::rng::{Purpose, SeedStream};
use crate::spread::{exact_spread, ImOracle, OracleResult, SpreadEvaluator, LIVE_EDGE_CAP, SEED_SET_CAP, TIE_TOLERANCE};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetMode {
    /// `max{1, (2m²n²/Δ²) ln(TΔ²/(mn³))}` with `Δ = Δ_min`.
    Dependent,
    /// `3.9 (m²T/n)^{2/3}`.
    Independent,
    /// Rounds per node given directly.
    Manual(usize),
}

/// The raw (ceiled) formula value and the per-node round count actually
/// used after clamping to `[1, ⌊T/n⌋]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExplorationBudget {
    pub formula: f64,
    pub k: usize,
}

pub fn exploration_budget(
    m: usize,
    n: usize,
    horizon: usize,
    mode: BudgetMode,
    delta_min: Option<f64>,
) -> Result<ExplorationBudget> {
    if n == 0 || horizon < n {
        return Err(Error::InvalidConfig(format!(
            "horizon {horizon} leaves no room for one exploration round per node ({n} nodes)"
        )));
    }
    let (m, nf, t) = (m as f64, n as f64, horizon as f64);
    let formula = match mode {
        BudgetMode::Manual(k) => {
            if k == 0 || n * k > horizon {
                return Err(Error::InvalidConfig(format!(
                    "exploration budget {k} must satisfy 1 <= k and n*k <= T ({n}*{k} > {horizon})"
                )));
            }
            return Ok(ExplorationBudget { formula: k as f64, k });
        }
        BudgetMode::Dependent => {
            let d = delta_min.filter(|d| *d > 0.0).ok_or(Error::MissingGap)?;
            let raw = 2.0 * m * m * nf * nf / (d * d) * (t * d * d / (m * nf.powi(3))).ln();
            raw.max(1.0).ceil()
        }
        BudgetMode::Independent => (3.9 * (m * m * t / nf).powf(2.0 / 3.0)).ceil(),
    };
    let cap = horizon / n;
    let k = if formula >= cap as f64 { cap } else { formula as usize }.max(1);
    Ok(ExplorationBudget { formula, k })
}

/// `Δ_S = α·Opt − r(S)` over the non-empty seed sets with `|S| ≤ K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaps {
    pub opt: f64,
    pub alpha: f64,
    /// Smallest gap of a bad set (`r(S) < α·Opt`), if any set is bad.
    pub delta_min: Option<f64>,
    pub delta_max: Option<f64>,
}

pub fn gaps(model: Model, graph: &Graph, weights: &WeightVector, k: usize, alpha: f64) -> Result<Gaps> {
    let n = graph.n();
    let required = subsets_up_to(n, k);
    if required > SEED_SET_CAP {
        return Err(Error::EnumerationTooLarge {
            what: "seed sets",
            required,
            cap: SEED_SET_CAP,
        });
    }
    let sets: Vec<Vec<usize>> = subsets_between(n, 1, k).collect();
    let values: Vec<f64> = sets
        .par_iter()
        .map(|s| exact_spread(model, graph, weights, s, LIVE_EDGE_CAP))
        .collect::<Result<_>>()?;
    let opt = values.iter().copied().fold(0.0, f64::max);
    let bar = alpha * opt;
    let bad: Vec<f64> = values
        .iter()
        .filter(|&&r| r < bar - TIE_TOLERANCE)
        .map(|&r| bar - r)
        .collect();
    Ok(Gaps {
        opt,
        alpha,
        delta_min: bad.iter().copied().reduce(f64::min),
        delta_max: bad.iter().copied().reduce(f64::max),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtcConfig {
    /// Seed-set size `K`.
    pub k: usize,
    pub horizon: usize,
    pub model: Model,
    pub budget: BudgetMode,
    #[serde(default)]
    pub delta_min: Option<f64>,
    #[serde(default)]
    pub delta_max: Option<f64>,
}

/// Per-edge Bernoulli counts collected during exploration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeEstimates {
    pub successes: Vec<u64>,
    pub trials: Vec<u64>,
}

impl EdgeEstimates {
    pub fn new(m: usize) -> Self {
        Self {
            successes: vec![0; m],
            trials: vec![0; m],
        }
    }

    /// `ŵ(e) = successes / trials`, zero for untried edges.
    pub fn means(&self) -> Vec<f64> {
        self.successes
            .iter()
            .zip(&self.trials)
            .map(|(&s, &t)| if t == 0 { 0.0 } else { s as f64 / t as f64 })
            .collect()
    }

    /// The means as a weight vector, rescaling any node whose estimated
    /// in-weights sum above one.
    pub fn weights(&self, graph: &Graph) -> Result<WeightVector> {
        WeightVector::normalized(graph, self.means())
    }
}

/// Runs one singleton-seed cascade and reports, for every out-edge of `u`,
/// whether its head activated at the first step.
pub fn explore_once(model: Model, graph: &Graph, w_true: &WeightVector, u: usize, stream: SeedStream) -> Vec<bool> {
    let mut rng = stream.purpose(Purpose::Exploration).rng();
    let trace = diffuse(model, graph, w_true, &[u], &mut rng);
    graph
        .out_edges(u)
        .iter()
        .map(|&e| trace.activation_time(graph.target(e)) == Some(1))
        .collect()
}

#[derive(Debug, Clone)]
pub struct EtcOutcome {
    pub records: Vec<RegretRecord>,
    pub budget: ExplorationBudget,
    pub estimates: EdgeEstimates,
    /// The oracle's answer on the estimated weights, played in every
    /// exploitation round.
    pub exploit: OracleResult,
}

/// Explore each node as a singleton seed `k` times (round-robin), estimate
/// every edge from first-step activations, call the oracle once, then
/// commit to its answer for the remaining rounds.
#[allow(clippy::too_many_arguments)]
pub fn run_etc(
    graph: &Graph,
    w_true: &WeightVector,
    config: EtcConfig,
    oracle: &impl ImOracle,
    stream: SeedStream,
    baseline: &OracleResult,
    evaluator: SpreadEvaluator,
    timing: bool,
) -> Result<EtcOutcome> {
    let n = graph.n();
    let delta_min = match (config.budget, config.delta_min) {
        (BudgetMode::Dependent, None) => gaps(config.model, graph, w_true, config.k, oracle.alpha())?.delta_min,
        (_, d) => d,
    };
    let budget = exploration_budget(graph.m(), n, config.horizon, config.budget, delta_min)?;
    let rounds = n * budget.k;

    let outcomes: Vec<Vec<bool>> = (0..rounds)
        .into_par_iter()
        .map(|r| explore_once(config.model, graph, w_true, r % n, stream.child(r as u64 + 1)))
        .collect();
    let mut estimates = EdgeEstimates::new(graph.m());
    for (r, hits) in outcomes.iter().enumerate() {
        for (&e, &hit) in graph.out_edges(r % n).iter().zip(hits) {
            estimates.trials[e] += 1;
            estimates.successes[e] += hit as u64;
        }
    }

    let exploit = oracle.solve(graph, &estimates.weights(graph)?, config.k)?;
    let eta_opt = oracle.alpha() * baseline.value;
    let mut tracker = RegretTracker::new(graph, w_true, evaluator, eta_opt, timing);
    for t in 1..=config.horizon {
        if t <= rounds {
            tracker.record(t, &[(t - 1) % n])?;
        } else {
            tracker.record(t, &exploit.seeds)?;
        }
    }
    Ok(EtcOutcome {
        records: tracker.records,
        budget,
        estimates,
        exploit,
    })
}
