//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

mod common;

use common::*;
use ltoim::bandit::{exploration_budget, run_etc, step, BudgetMode, EtcConfig, LinUcbConfig, LinUcbState};
use ltoim::diffusion::{diffuse_lt, sample_thresholds, Model, ObservationPair};
use ltoim::gom::{verify_gom, GOM_TOLERANCE};
use ltoim::graph::{build_graph, save_graph, Graph, WeightVector};
use ltoim::harness::{run_experiment, run_replications, ExperimentConfig};
use ltoim::rng::SeedStream;
use ltoim::spread::{
    exact_marginals, exact_spread_lt, mc_spread, ConfiguredImOracle, ExactImOracle, ImOracle, ImOracleKind, OracleResult,
    SpreadEvaluator, GREEDY_ALPHA, LIVE_EDGE_CAP,
};
use ltoim::wcim::{
    bipartite_value, epsilon_net_pair_oracle, exhaustive_pair_opt, greedy_pair_oracle, submodularity_probe, wcim_value_dag,
    BipartiteConvention, BipartiteValue, BoxMode, ConfidenceSet, ConfiguredPairOracle, LayeredValue, NodeEllipsoid,
    PairOracleKind, ProbeMode,
};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::path::Path;
use std::time::{Duration, Instant};

/// Tolerances and sizes, pinned.
const COUNTEREXAMPLE_TOL: f64 = 1e-3;
const GOM_INSTANCES: usize = 200;
const MC_SIMS: usize = 100_000;
const MC_GRAPHS: usize = 50;
const MARGINAL_GRAPHS: usize = 10;
const SIGMAS: f64 = 3.0;
const COVERAGE_RUNS: usize = 100;
const COVERAGE_DELTA: f64 = 0.05;
const COVERAGE_SLACK: f64 = 0.02;
const BAR_REPLICATIONS: usize = 100;
const BAR_REQUIRED: usize = 95;
const NET_EPSILON: f64 = 0.05;
const INVERSE_TOL: f64 = 1e-8;
const INVERSE_UPDATES: usize = 10_000;

/// In-star with distinct weights: leaves 1..4 point at node 0.
fn in_star() -> (Graph, WeightVector) {
    build_graph(&[(1, 0, 0.5), (2, 0, 0.25), (3, 0, 0.15), (4, 0, 0.05)]).unwrap()
}

fn ellipsoid(node: usize, dim: usize, rng: &mut impl Rng) -> NodeEllipsoid {
    let a = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
    let m = DMatrix::identity(dim, dim) + &a * a.transpose() * rng.gen_range(0.0..4.0);
    let center = DVector::from_fn(dim, |_, _| rng.gen_range(0.0..0.3) / dim as f64);
    let b = &m * center;
    NodeEllipsoid::new(node, m, b, rng.gen_range(0.05..0.5)).unwrap()
}

fn random_confidence_set(g: &Graph, rng: &mut impl Rng) -> ConfidenceSet {
    let ells = (0..g.n())
        .filter(|&v| g.in_degree(v) > 0)
        .map(|v| ellipsoid(v, g.in_degree(v), rng))
        .collect();
    ConfidenceSet::new(g, ells).unwrap()
}

fn c1() -> (bool, String) {
    let (g, _) = build_graph(&[(0, 3, 0.1), (1, 3, 0.1), (2, 3, 0.1)]).unwrap();
    let m = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
    let set = ConfidenceSet::new(&g, vec![NodeEllipsoid::new(3, m, DVector::zeros(3), 1.0).unwrap()]).unwrap();
    let value = |s: &[usize]| bipartite_value(&g, &set, s, BoxMode::EllipsoidOnly, BipartiteConvention::EdgeSum).map(|r| r.0);
    let mut ok = true;
    let mut got = Vec::new();
    for (seeds, printed) in [
        (vec![1], 0.707),
        (vec![0, 1], 0.791),
        (vec![1, 2], 0.791),
        (vec![0, 1, 2], 1.000),
    ] {
        let v = value(&seeds).unwrap();
        ok &= (v - printed).abs() < COUNTEREXAMPLE_TOL;
        got.push(format!("{v:.4}"));
    }
    let report = submodularity_probe(value, &[0, 1, 2], ProbeMode::Exhaustive).unwrap();
    let found = report
        .violations
        .iter()
        .any(|x| x.small == [1] && x.large == [1, 2] && x.node == 0 && x.gain_small < 0.09 && x.gain_large > 0.2);
    (ok && found, format!("values {} violation found: {found}", got.join("/")))
}

fn c2() -> (bool, String) {
    let mut rng = SeedStream::new(2).rng();
    let mut worst = f64::INFINITY;
    for _ in 0..GOM_INSTANCES {
        let n = rng.gen_range(2..=5);
        let (g, w) = random_graph(n, rng.gen_range(0.2..0.8), rng.gen_bool(0.5), &mut rng);
        let wp = random_weights(&g, &mut rng);
        let seeds = random_seeds(n, n, &mut rng);
        worst = worst.min(verify_gom(&g, &w, &wp, &seeds, LIVE_EDGE_CAP).unwrap().slack);
    }
    let (g, w) = build_graph(&[(0, 1, 0.2)]).unwrap();
    let wp = WeightVector::new(&g, vec![0.5]).unwrap();
    let single = verify_gom(&g, &w, &wp, &[0], LIVE_EDGE_CAP).unwrap();
    let exact = (single.lhs - 0.3).abs() < 1e-12 && (single.rhs - 0.54).abs() < 1e-12;
    (
        worst >= -GOM_TOLERANCE && exact,
        format!(
            "worst slack {worst:.3e} over {GOM_INSTANCES}; single edge lhs {:.4} rhs {:.4}",
            single.lhs, single.rhs
        ),
    )
}

fn c3() -> (bool, String) {
    let mut rng = SeedStream::new(3).rng();
    let mut worst_z: f64 = 0.0;
    for _ in 0..MC_GRAPHS {
        let n = rng.gen_range(2..=6);
        let (g, w) = random_graph(n, rng.gen_range(0.2..0.7), false, &mut rng);
        let seeds = random_seeds(n, 2, &mut rng);
        let exact = exact_spread_lt(&g, &w, &seeds).unwrap();
        let est = mc_spread(&g, &w, &seeds, MC_SIMS, &mut rng);
        let z = if est.std_error > 0.0 {
            (est.mean - exact).abs() / est.std_error
        } else if (est.mean - exact).abs() < 1e-9 {
            0.0
        } else {
            f64::INFINITY
        };
        worst_z = worst_z.max(z);
    }
    let mut worst_m: f64 = 0.0;
    for _ in 0..MARGINAL_GRAPHS {
        let n = rng.gen_range(2..=6);
        let (g, w) = random_graph(n, rng.gen_range(0.2..0.7), false, &mut rng);
        let seeds = random_seeds(n, 2, &mut rng);
        let exact = exact_marginals(Model::Lt, &g, &w, &seeds, LIVE_EDGE_CAP).unwrap();
        let runs = 20_000;
        let mut hits = vec![0usize; n];
        for _ in 0..runs {
            let trace = diffuse_lt(&g, &w, &seeds, &sample_thresholds(&g, &mut rng));
            for (v, h) in hits.iter_mut().enumerate() {
                *h += trace.is_active(v) as usize;
            }
        }
        for v in 0..n {
            let p = exact[v];
            let f = hits[v] as f64 / runs as f64;
            let sigma = (p * (1.0 - p) / runs as f64).sqrt();
            let z = if sigma > 0.0 {
                (f - p).abs() / sigma
            } else if (f - p).abs() < 1e-9 {
                0.0
            } else {
                f64::INFINITY
            };
            worst_m = worst_m.max(z);
        }
    }
    (
        worst_z <= SIGMAS && worst_m <= SIGMAS,
        format!("worst spread z {worst_z:.2} ({MC_GRAPHS} graphs), worst marginal z {worst_m:.2} ({MARGINAL_GRAPHS} graphs)"),
    )
}

fn linucb_oracle() -> ConfiguredPairOracle {
    ConfiguredPairOracle {
        kind: PairOracleKind::Auto,
        im: ConfiguredImOracle {
            model: Model::Lt,
            kind: ImOracleKind::Exact,
        },
        mode: BoxMode::EllipsoidOnly,
    }
}

fn c4() -> (bool, String) {
    let (g, w) = in_star();
    let oracle = linucb_oracle();
    let horizon = 500;
    let violated = (0..COVERAGE_RUNS)
        .filter(|&r| {
            let config = LinUcbConfig {
                delta: Some(COVERAGE_DELTA),
                ..LinUcbConfig::new(1)
            };
            let mut s = LinUcbState::new(&g, config, horizon).unwrap();
            let stream = SeedStream::new(4).child(r as u64);
            (0..horizon).any(|_| !step(&mut s, &g, &w, &oracle, stream).unwrap().violations.is_empty())
        })
        .count();
    let freq = violated as f64 / COVERAGE_RUNS as f64;
    let bound = g.n() as f64 * COVERAGE_DELTA + COVERAGE_SLACK;
    (freq <= bound, format!("violation frequency {freq:.2} (bound {bound:.2})"))
}

fn experiment(dir: &Path, algorithm: &str, horizon: usize, replications: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig::from_json(&format!(
        r#"{{"graph": {{"file": "star.json"}}, "algorithm": {algorithm}, "k": 1, "horizon": {horizon},
            "replications": {replications}, "seed": {seed}, "output": "{}"}}"#,
        dir.join("out.csv").display()
    ))
    .unwrap()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

fn window_regret(run: &[ltoim::bandit::RegretRecord], lo: usize, hi: usize) -> f64 {
    let before = if lo == 1 { 0.0 } else { run[lo - 2].cum_regret };
    (run[hi - 1].cum_regret - before) / (hi - lo + 1) as f64
}

fn c5() -> (bool, String) {
    let dir = tempfile::tempdir().unwrap();
    let (g, w) = in_star();
    save_graph(dir.path().join("star.json"), &g, &w).unwrap();
    let horizon = 2000;
    let lin = run_replications(
        &experiment(dir.path(), r#"{"name": "lt_linucb"}"#, horizon, 20, 5),
        dir.path(),
    )
    .unwrap();
    let etc = run_replications(
        &experiment(dir.path(), r#"{"name": "oim_etc", "budget": "independent"}"#, horizon, 20, 5),
        dir.path(),
    )
    .unwrap();
    let early = median(lin.runs.iter().map(|r| window_regret(r, 1, 500)).collect());
    let late = median(lin.runs.iter().map(|r| window_regret(r, 1501, horizon)).collect());
    let lin_total = median(lin.runs.iter().map(|r| r[horizon - 1].cum_regret).collect());
    let etc_total = median(etc.runs.iter().map(|r| r[horizon - 1].cum_regret).collect());
    (
        late < early && lin_total < etc_total,
        format!("median per-round regret {early:.4} (1-500) -> {late:.4} (1501-2000); cumulative {lin_total:.1} vs ETC {etc_total:.1}"),
    )
}

fn c6() -> (bool, String) {
    let b59 = exploration_budget(2, 2, 100, BudgetMode::Dependent, Some(1.0)).unwrap();
    let b1 = exploration_budget(2, 2, 10, BudgetMode::Dependent, Some(1.0)).unwrap();
    let b983 = exploration_budget(4, 4, 1000, BudgetMode::Independent, None).unwrap();
    let budgets = b59.formula == 59.0 && b59.k == 50 && (b1.formula, b1.k) == (1.0, 1) && (b983.formula, b983.k) == (983.0, 250);

    let (g, w) = build_graph(&[(0, 1, 0.9), (2, 3, 0.1)]).unwrap();
    let oracle = ExactImOracle::new(Model::Lt);
    let baseline: OracleResult = oracle.solve(&g, &w, 1).unwrap();
    let config = EtcConfig {
        k: 1,
        horizon: 400,
        model: Model::Lt,
        budget: BudgetMode::Manual(50),
        delta_min: None,
        delta_max: None,
    };
    let hits = (0..BAR_REPLICATIONS)
        .filter(|&r| {
            let out = run_etc(
                &g,
                &w,
                config,
                &oracle,
                SeedStream::new(6).child(r as u64),
                &baseline,
                SpreadEvaluator::exact(Model::Lt),
                false,
            )
            .unwrap();
            out.exploit.seeds == baseline.seeds
        })
        .count();
    (
        budgets && hits >= BAR_REQUIRED,
        format!(
            "budgets {}/{} {}/{} {}/{}; bar graph optimal in {hits}/{BAR_REPLICATIONS}",
            b59.formula, b59.k, b1.formula, b1.k, b983.formula, b983.k
        ),
    )
}

/// Ignores the weights' optimum and always returns a fixed seed set, so the
/// ε-net can be evaluated at a given set.
struct FixedSeeds(Vec<usize>);

impl ImOracle for FixedSeeds {
    fn solve(&self, graph: &Graph, weights: &WeightVector, _k: usize) -> ltoim::Result<OracleResult> {
        Ok(OracleResult {
            seeds: self.0.clone(),
            value: exact_spread_lt(graph, weights, &self.0)?,
            alpha: 1.0,
            beta: 1.0,
        })
    }
}

fn c7() -> (bool, String) {
    let mut rng = SeedStream::new(7).rng();
    let mut ok = true;
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(2..=4);
        let (g, _) = random_graph(n, 0.5, true, &mut rng);
        if g.m() == 0 {
            continue;
        }
        let set = random_confidence_set(&g, &mut rng);
        let k = rng.gen_range(1..=2);
        let greedy = greedy_pair_oracle(
            &LayeredValue {
                graph: &g,
                set: &set,
                mode: BoxMode::BoxClipped,
            },
            k,
        )
        .unwrap();
        let at_greedy = epsilon_net_pair_oracle(&g, &set, k, NET_EPSILON, &FixedSeeds(greedy.seeds.clone()), 1e6).unwrap();
        let net = epsilon_net_pair_oracle(&g, &set, k, NET_EPSILON, &ExactImOracle::new(Model::Lt), 1e6).unwrap();
        let tol = (g.m() * g.n()) as f64 * NET_EPSILON;
        let dag_at_net = wcim_value_dag(&g, &set, &net.seeds, BoxMode::BoxClipped).unwrap().value;
        let gap = greedy.value - at_greedy.value;
        ok &= gap >= -1e-9 && gap <= tol;
        ok &= net.value <= dag_at_net + 1e-9 && dag_at_net - net.value <= tol;
        ok &= net.value >= greedy.value - tol;
        worst_ratio = worst_ratio.max(gap / tol);
    }
    (ok, format!("largest gap at matching sets {:.3} of m·n·ε", worst_ratio))
}

fn bipartite_instance(rng: &mut impl Rng) -> (Graph, ConfidenceSet) {
    let left = rng.gen_range(2..=4);
    let right = rng.gen_range(1..=3);
    let mut pairs = Vec::new();
    for v in left..left + right {
        let d = rng.gen_range(1..=2.min(left));
        let mut us: Vec<usize> = (0..left).collect();
        for _ in 0..d {
            let u = us.swap_remove(rng.gen_range(0..us.len()));
            pairs.push((u, v));
        }
    }
    let g = Graph::new(left + right, &pairs).unwrap();
    let set = random_confidence_set(&g, rng);
    (g, set)
}

fn c8() -> (bool, String) {
    let mut rng = SeedStream::new(8).rng();
    let mut worst_b = f64::INFINITY;
    for _ in 0..30 {
        let (g, set) = bipartite_instance(&mut rng);
        let value = BipartiteValue {
            graph: &g,
            set: &set,
            mode: BoxMode::EllipsoidOnly,
            convention: BipartiteConvention::EdgeSum,
        };
        let k = rng.gen_range(1..=3);
        let greedy = greedy_pair_oracle(&value, k).unwrap().value;
        let opt = exhaustive_pair_opt(&value, k).unwrap().value;
        worst_b = worst_b.min(greedy - GREEDY_ALPHA * opt);
    }
    let mut worst_d = f64::INFINITY;
    for _ in 0..30 {
        let n = rng.gen_range(2..=7);
        let (g, _) = random_graph(n, rng.gen_range(0.2..0.6), true, &mut rng);
        let set = random_confidence_set(&g, &mut rng);
        let value = LayeredValue {
            graph: &g,
            set: &set,
            mode: BoxMode::EllipsoidOnly,
        };
        let k = rng.gen_range(1..=3);
        let greedy = greedy_pair_oracle(&value, k).unwrap().value;
        let opt = exhaustive_pair_opt(&value, k).unwrap().value;
        worst_d = worst_d.min(greedy - opt / k as f64);
    }
    (
        worst_b >= -1e-9 && worst_d >= -1e-9,
        format!("smallest margin {worst_b:.4} over (1-1/e)·opt (bipartite), {worst_d:.4} over opt/K (DAG)"),
    )
}

fn c9() -> (bool, String) {
    let dir = tempfile::tempdir().unwrap();
    let (g, w) = in_star();
    save_graph(dir.path().join("star.json"), &g, &w).unwrap();
    let mut identical = true;
    for algorithm in [r#"{"name": "lt_linucb"}"#, r#"{"name": "oim_etc", "budget": "independent"}"#] {
        let config = experiment(dir.path(), algorithm, 200, 3, 9);
        run_experiment(&config, dir.path()).unwrap();
        let first = std::fs::read(&config.output).unwrap();
        run_experiment(&config, dir.path()).unwrap();
        identical &= first == std::fs::read(&config.output).unwrap();
    }

    let (g, _) = build_graph(&[(0, 4, 0.1), (1, 4, 0.1), (2, 4, 0.1), (3, 4, 0.1)]).unwrap();
    let mut s = LinUcbState::new(&g, LinUcbConfig::new(1), 1).unwrap();
    let mut rng = SeedStream::new(9).rng();
    for _ in 0..INVERSE_UPDATES {
        let positions: Vec<usize> = (0..4).filter(|_| rng.gen_bool(0.5)).collect();
        s.update(
            4,
            &ObservationPair {
                tau: 0,
                positions,
                label: rng.gen_bool(0.3),
            },
        );
    }
    let m = s.gramian(4);
    let direct = gauss_jordan_inverse(&(0..4).map(|i| (0..4).map(|j| m[(i, j)]).collect()).collect::<Vec<_>>());
    let cached = s.cached_inverse(4);
    let err = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .map(|(i, j)| (direct[i][j] - cached[(i, j)]).abs())
        .fold(0.0, f64::max);
    (
        identical && err <= INVERSE_TOL,
        format!("CSV reruns identical: {identical}; inverse error {err:.2e} after {INVERSE_UPDATES} updates"),
    )
}

fn main() {
    type Check = fn() -> (bool, String);
    let criteria: [(Check, u64); 9] = [
        (c1, 1),
        (c2, 300),
        (c3, 600),
        (c4, 600),
        (c5, 1200),
        (c6, 300),
        (c7, 600),
        (c8, 600),
        (c9, 120),
    ];
    let mut failed = 0;
    for (i, (check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let pass = ok && in_time;
        failed += !pass as usize;
        println!(
            "criterion {}: {} — {detail} [{:.2}s, limit {budget}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
