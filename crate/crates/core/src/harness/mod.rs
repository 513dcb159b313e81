//! Experiment configuration, replication and CSV / JSON output.

use crate::bandit::{self, BudgetMode, ExplorationBudget, LinUcbConfig, RadiusMode, RegretRecord};
use crate::diffusion::Model;
use crate::error::{Error, Result};
use crate::graph::{generate, load_graph, Graph, GraphFamilyParams, WeightVector, FORMAT_VERSION};
use crate::rng::{Purpose, SeedStream};
use crate::spread::{
    ConfiguredImOracle, EvalMode, ExactImOracle, GreedyImOracle, ImOracle, ImOracleKind, OracleResult, SpreadEvaluator,
};
use crate::wcim::{BoxMode, ConfiguredPairOracle, PairOracle, PairOracleKind};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const CSV_HEADER: [&str; 7] = [
    "replication",
    "round",
    "seed_set",
    "spread",
    "eta_opt",
    "cum_regret",
    "ms_elapsed",
];

fn default_version() -> u64 {
    FORMAT_VERSION
}

fn default_replications() -> usize {
    1
}

fn default_model() -> Model {
    Model::Lt
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphSource {
    File(PathBuf),
    Generate(GraphFamilyParams),
}

impl GraphSource {
    /// Loads or generates the graph; relative paths resolve against `base`.
    pub fn load(&self, base: &Path) -> Result<(Graph, WeightVector)> {
        match self {
            GraphSource::File(p) => load_graph(base.join(p)),
            GraphSource::Generate(params) => generate(params),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Algorithm {
    LtLinucb {
        #[serde(default)]
        radius: RadiusMode,
        #[serde(default)]
        pair_oracle: PairOracleKind,
        #[serde(default)]
        box_mode: BoxMode,
    },
    OimEtc {
        budget: BudgetMode,
        #[serde(default = "default_model")]
        model: Model,
        #[serde(default)]
        delta_min: Option<f64>,
    },
}

impl Algorithm {
    pub fn model(&self) -> Model {
        match self {
            Algorithm::LtLinucb { .. } => Model::Lt,
            Algorithm::OimEtc { model, .. } => *model,
        }
    }
}

/// A batch of independent runs. Paths are relative to the directory the
/// config was loaded from (or the working directory).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_version")]
    pub format_version: u64,
    pub graph: GraphSource,
    pub algorithm: Algorithm,
    /// Offline IM oracle used by the learner (edge-UCB / ε-net pair
    /// oracles and the ETC commit step).
    #[serde(default)]
    pub im_oracle: ImOracleKind,
    pub k: usize,
    pub horizon: usize,
    /// Failure probability for LT-LinUCB; `1/(n√T)` when absent.
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    /// How `r(S, w)` and the baseline are computed.
    #[serde(default)]
    pub evaluation: EvalMode,
    pub output: PathBuf,
    /// Summary path; defaults to the output path with a `.json` extension.
    #[serde(default)]
    pub summary: Option<PathBuf>,
    /// Fill the `ms_elapsed` column. Off by default because wall-clock
    /// time would make reruns differ.
    #[serde(default)]
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::UnsupportedFormat(self.format_version));
        }
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.horizon == 0 {
            return bad("horizon must be at least 1");
        }
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if self.replications == 0 {
            return bad("replications must be at least 1");
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d <= 1.0) {
                return Err(Error::InvalidDelta(d));
            }
        }
        if let EvalMode::MonteCarlo { sims: 0, .. } = self.evaluation {
            return bad("Monte Carlo evaluation needs at least one simulation");
        }
        if let Algorithm::LtLinucb {
            radius: RadiusMode::Fixed(r),
            ..
        } = self.algorithm
        {
            if r.is_nan() || r < 0.0 {
                return bad("fixed radius must be non-negative");
            }
        }
        if let Algorithm::LtLinucb {
            pair_oracle: PairOracleKind::EpsilonNet { epsilon, cap },
            ..
        } = self.algorithm
        {
            if epsilon.is_nan() || epsilon <= 0.0 || cap.is_nan() || cap < 1.0 {
                return bad("epsilon-net needs epsilon > 0 and cap >= 1");
            }
        }
        Ok(())
    }

    pub fn summary_path(&self) -> PathBuf {
        self.summary.clone().unwrap_or_else(|| self.output.with_extension("json"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl Quantiles {
    /// Linear-interpolation quantiles of a non-empty sample.
    pub fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let x = p * (v.len() - 1) as f64;
            let (lo, hi) = (x.floor() as usize, x.ceil() as usize);
            v[lo] + (v[hi] - v[lo]) * (x - lo as f64)
        };
        Self {
            min: v[0],
            q25: q(0.25),
            median: q(0.5),
            q75: q(0.75),
            max: v[v.len() - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub format_version: u64,
    pub algorithm: Algorithm,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub horizon: usize,
    pub replications: usize,
    pub baseline: OracleResult,
    /// `η` of the learner's oracle.
    pub eta: f64,
    pub eta_opt: f64,
    /// Exploration rounds per node, for OIM-ETC.
    pub exploration: Option<ExplorationBudget>,
    /// Mean over replications of `R(t)`, for every round.
    pub mean_cum_regret: Vec<f64>,
    pub final_regret: Quantiles,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    /// One record series per replication, in replication order.
    pub runs: Vec<Vec<RegretRecord>>,
    pub summary: ExperimentSummary,
}

/// The reference `Opt_w`: exact enumeration under exact evaluation,
/// greedy on the evaluator otherwise.
pub fn baseline(graph: &Graph, weights: &WeightVector, k: usize, evaluator: SpreadEvaluator) -> Result<OracleResult> {
    match evaluator.mode {
        EvalMode::Exact { cap } => ExactImOracle {
            live_edge_cap: cap,
            ..ExactImOracle::new(evaluator.model)
        }
        .solve(graph, weights, k),
        EvalMode::MonteCarlo { .. } => GreedyImOracle { evaluator }.solve(graph, weights, k),
    }
}

/// Runs every replication in memory.
pub fn run_replications(config: &ExperimentConfig, base: &Path) -> Result<ExperimentResult> {
    config.validate()?;
    let (graph, weights) = config.graph.load(base)?;
    if config.k > graph.n() {
        return Err(Error::InvalidConfig(format!(
            "k = {} exceeds the number of nodes ({})",
            config.k,
            graph.n()
        )));
    }
    let model = config.algorithm.model();
    let evaluator = SpreadEvaluator {
        model,
        mode: config.evaluation,
    };
    let base_result = baseline(&graph, &weights, config.k, evaluator)?;
    let im = ConfiguredImOracle {
        model,
        kind: config.im_oracle,
    };
    let master = SeedStream::new(config.seed).purpose(Purpose::Replication);

    let (eta, runs, exploration) = match config.algorithm {
        Algorithm::LtLinucb {
            radius,
            pair_oracle,
            box_mode,
        } => {
            let oracle = ConfiguredPairOracle {
                kind: pair_oracle,
                im,
                mode: box_mode,
            };
            let lin = LinUcbConfig {
                k: config.k,
                delta: config.delta,
                radius,
            };
            let runs = (0..config.replications)
                .into_par_iter()
                .map(|r| {
                    bandit::run(
                        &graph,
                        &weights,
                        lin,
                        config.horizon,
                        &oracle,
                        master.child(r as u64),
                        &base_result,
                        evaluator,
                        config.record_timing,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            (oracle.eta(&graph, config.k), runs, None)
        }
        Algorithm::OimEtc {
            budget,
            model,
            delta_min,
        } => {
            let etc = bandit::EtcConfig {
                k: config.k,
                horizon: config.horizon,
                model,
                budget,
                delta_min,
                delta_max: None,
            };
            let outcomes = (0..config.replications)
                .into_par_iter()
                .map(|r| {
                    bandit::run_etc(
                        &graph,
                        &weights,
                        etc,
                        &im,
                        master.child(r as u64),
                        &base_result,
                        evaluator,
                        config.record_timing,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let budget = outcomes[0].budget;
            (im.alpha(), outcomes.into_iter().map(|o| o.records).collect(), Some(budget))
        }
    };

    let horizon = config.horizon;
    let mean_cum_regret = (0..horizon)
        .map(|t| runs.iter().map(|r| r[t].cum_regret).sum::<f64>() / runs.len() as f64)
        .collect();
    let finals: Vec<f64> = runs.iter().map(|r| r[horizon - 1].cum_regret).collect();
    let summary = ExperimentSummary {
        format_version: FORMAT_VERSION,
        algorithm: config.algorithm,
        n: graph.n(),
        m: graph.m(),
        k: config.k,
        horizon,
        replications: config.replications,
        eta_opt: eta * base_result.value,
        baseline: base_result,
        eta,
        exploration,
        mean_cum_regret,
        final_regret: Quantiles::of(&finals),
    };
    Ok(ExperimentResult { runs, summary })
}

/// Writes one row per (replication, round).
pub fn write_csv<W: std::io::Write>(out: W, runs: &[Vec<RegretRecord>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for (rep, records) in runs.iter().enumerate() {
        for r in records {
            let seeds: Vec<String> = r.seeds.iter().map(|s| s.to_string()).collect();
            w.write_record([
                rep.to_string(),
                r.round.to_string(),
                seeds.join(";"),
                r.spread.to_string(),
                r.eta_opt.to_string(),
                r.cum_regret.to_string(),
                r.ms_elapsed.map(|x| format!("{x:.3}")).unwrap_or_default(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Runs the experiment and writes the CSV and the JSON summary.
pub fn run_experiment(config: &ExperimentConfig, base: &Path) -> Result<ExperimentResult> {
    let result = run_replications(config, base)?;
    let csv_path = base.join(&config.output);
    if let Some(dir) = csv_path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    write_csv(std::fs::File::create(&csv_path)?, &result.runs)?;
    let text = serde_json::to_string_pretty(&result.summary)?;
    std::fs::write(base.join(config.summary_path()), text + "\n")?;
    Ok(result)
}
