//! Online learners: LT-LinUCB (node-level feedback, linear regression per
//! node) and OIM-ETC (explore with singleton seeds, then commit).

mod etc;
mod linucb;

pub use etc::{
    exploration_budget, explore_once, gaps, run_etc, BudgetMode, EdgeEstimates, EtcConfig, EtcOutcome, ExplorationBudget, Gaps,
};
pub use linucb::{confidence_radius, run, step, LinUcbConfig, LinUcbState, RadiusMode, StepOutcome};

use crate::error::Result;
use crate::graph::{Graph, WeightVector};
use crate::spread::SpreadEvaluator;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::time::Instant;

/// One round of an online run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretRecord {
    /// 1-based round index.
    pub round: usize,
    pub seeds: Vec<usize>,
    /// Expected spread `r(S_t, w)` under the true weights.
    pub spread: f64,
    /// `η · Opt_w`.
    pub eta_opt: f64,
    /// `R(t) = R(t−1) + η·Opt_w − r(S_t, w)`.
    pub cum_regret: f64,
    /// Wall-clock time since the start of the run, when requested.
    pub ms_elapsed: Option<f64>,
}

/// Accumulates η-scaled regret, caching spreads per seed set.
pub(crate) struct RegretTracker<'a> {
    graph: &'a Graph,
    weights: &'a WeightVector,
    evaluator: SpreadEvaluator,
    eta_opt: f64,
    cum: f64,
    cache: HashMap<Vec<usize>, f64>,
    start: Option<Instant>,
    pub records: Vec<RegretRecord>,
}

impl<'a> RegretTracker<'a> {
    pub fn new(graph: &'a Graph, weights: &'a WeightVector, evaluator: SpreadEvaluator, eta_opt: f64, timing: bool) -> Self {
        Self {
            graph,
            weights,
            evaluator,
            eta_opt,
            cum: 0.0,
            cache: HashMap::new(),
            start: timing.then(Instant::now),
            records: Vec::new(),
        }
    }

    pub fn record(&mut self, round: usize, seeds: &[usize]) -> Result<()> {
        let mut key = seeds.to_vec();
        key.sort_unstable();
        let spread = match self.cache.get(&key) {
            Some(&s) => s,
            None => {
                let s = self.evaluator.evaluate(self.graph, self.weights, &key)?;
                self.cache.insert(key.clone(), s);
                s
            }
        };
        self.cum += self.eta_opt - spread;
        self.records.push(RegretRecord {
            round,
            seeds: key,
            spread,
            eta_opt: self.eta_opt,
            cum_regret: self.cum,
            ms_elapsed: self.start.map(|s| s.elapsed().as_secs_f64() * 1e3),
        });
        Ok(())
    }
}
