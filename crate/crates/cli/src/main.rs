//! `ltoim`: generate graphs, run online experiments, check the smoothness
//! bound and solve weight-constrained IM instances.

use clap::{Parser, Subcommand, ValueEnum};
use ltoim::diffusion::Model;
use ltoim::gom::{verify_gom, verify_update_bound};
use ltoim::graph::{generate, load_graph, load_weights_for, save_graph, Family, GraphFamilyParams, Orientation, WeightRule};
use ltoim::harness::{run_experiment, ExperimentConfig};
use ltoim::spread::{ConfiguredImOracle, ImOracleKind, LIVE_EDGE_CAP};
use ltoim::wcim::{BoxMode, ConfidenceSet, ConfiguredPairOracle, PairOracle, PairOracleKind, DEFAULT_EPSILON, NET_CAP};
use ltoim::{Error, Result};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ltoim",
    version,
    about = "Online influence maximization under the linear threshold model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph from one of the built-in families.
    GenerateGraph(GenerateArgs),
    /// Run an experiment described by a JSON config.
    Run {
        /// Experiment config; relative paths inside it resolve against its directory.
        #[arg(long)]
        config: PathBuf,
    },
    /// Check the bounded-smoothness inequality exactly and print a JSON report.
    GomCheck(GomArgs),
    /// Solve one weight-constrained IM instance and print the pair as JSON.
    WcimSolve(WcimArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Bar,
    Chain,
    Star,
    Ray,
    Tree,
    Grid,
    Complete,
    Bipartite,
    Dag,
    ErdosRenyi,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    Forward,
    Reverse,
    Both,
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    /// Node count (chain, star, tree, complete, dag, erdos-renyi).
    #[arg(long)]
    n: Option<usize>,
    /// Number of disjoint edges (bar).
    #[arg(long)]
    pairs: Option<usize>,
    /// Number of rays (ray).
    #[arg(long)]
    rays: Option<usize>,
    /// Nodes per ray (ray).
    #[arg(long)]
    length: Option<usize>,
    /// Lattice rows (grid).
    #[arg(long)]
    rows: Option<usize>,
    /// Lattice columns (grid).
    #[arg(long)]
    cols: Option<usize>,
    /// Left partition size (bipartite).
    #[arg(long)]
    left: Option<usize>,
    /// Right partition size (bipartite).
    #[arg(long)]
    right: Option<usize>,
    /// Edge probability (bipartite, dag, erdos-renyi).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_enum, default_value = "forward")]
    orientation: OrientationArg,
    /// Constant weight on every edge; uniform random weights when absent.
    #[arg(long)]
    weight: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output graph file.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(clap::Args)]
struct GomArgs {
    /// Graph file; its weights are used for `w` unless `--w` is given.
    #[arg(long)]
    graph: PathBuf,
    /// Weight file for `w` (same edges as the graph).
    #[arg(long)]
    w: Option<PathBuf>,
    /// Weight file for `w′`.
    #[arg(long)]
    wprime: PathBuf,
    /// Comma-separated seed ids.
    #[arg(long, value_delimiter = ',', required = true)]
    seeds: Vec<usize>,
    /// Maximum number of live-edge worlds to enumerate.
    #[arg(long, default_value_t = LIVE_EDGE_CAP)]
    cap: f64,
    /// Also check the per-node update bound.
    #[arg(long)]
    update_bound: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PairOracleArg {
    Auto,
    EdgeUcb,
    LayeredGreedy,
    EpsilonNet,
}

#[derive(clap::Args)]
struct WcimArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Confidence set: `{"<node>": {"M": [[..]], "b": [..], "rho": r}}`.
    #[arg(long)]
    confidence: PathBuf,
    /// Seed-set size.
    #[arg(short, long)]
    k: usize,
    #[arg(long, value_enum, default_value = "auto")]
    oracle: PairOracleArg,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Maximum number of ε-net points.
    #[arg(long, default_value_t = NET_CAP)]
    net_cap: f64,
    /// Clamp representative weights into [0, 1].
    #[arg(long)]
    box_clipped: bool,
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidConfig(format!("--{flag} is required for this family")))
}

fn family(a: &GenerateArgs) -> Result<Family> {
    Ok(match a.family {
        FamilyName::Bar => Family::Bar {
            pairs: require(a.pairs, "pairs")?,
        },
        FamilyName::Chain => Family::Chain { n: require(a.n, "n")? },
        FamilyName::Star => Family::Star { n: require(a.n, "n")? },
        FamilyName::Ray => Family::Ray {
            rays: require(a.rays, "rays")?,
            length: require(a.length, "length")?,
        },
        FamilyName::Tree => Family::Tree { n: require(a.n, "n")? },
        FamilyName::Grid => Family::Grid {
            rows: require(a.rows, "rows")?,
            cols: require(a.cols, "cols")?,
        },
        FamilyName::Complete => Family::Complete { n: require(a.n, "n")? },
        FamilyName::Bipartite => Family::Bipartite {
            left: require(a.left, "left")?,
            right: require(a.right, "right")?,
            p: require(a.p, "p")?,
        },
        FamilyName::Dag => Family::Dag {
            n: require(a.n, "n")?,
            p: require(a.p, "p")?,
        },
        FamilyName::ErdosRenyi => Family::ErdosRenyi {
            n: require(a.n, "n")?,
            p: require(a.p, "p")?,
        },
    })
}

fn generate_graph(a: &GenerateArgs) -> Result<()> {
    let params = GraphFamilyParams {
        family: family(a)?,
        orientation: match a.orientation {
            OrientationArg::Forward => Orientation::Forward,
            OrientationArg::Reverse => Orientation::Reverse,
            OrientationArg::Both => Orientation::Both,
        },
        weights: a.weight.map_or(WeightRule::Uniform, WeightRule::Constant),
        seed: a.seed,
    };
    let (graph, weights) = generate(&params)?;
    save_graph(&a.output, &graph, &weights)
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn gom_check(a: &GomArgs) -> Result<()> {
    let (graph, file_weights) = load_graph(&a.graph)?;
    let w = match &a.w {
        Some(p) => load_weights_for(p, &graph)?,
        None => file_weights,
    };
    let w_prime = load_weights_for(&a.wprime, &graph)?;
    let report = verify_gom(&graph, &w, &w_prime, &a.seeds, a.cap)?;
    if a.update_bound {
        let bound = verify_update_bound(&graph, &w, &w_prime, &a.seeds, a.cap)?;
        print_json(&serde_json::json!({ "gom": report, "update_bound": bound }))
    } else {
        print_json(&report)
    }
}

fn wcim_solve(a: &WcimArgs) -> Result<()> {
    let (graph, _) = load_graph(&a.graph)?;
    let set = ConfidenceSet::load(&a.confidence, &graph)?;
    let kind = match a.oracle {
        PairOracleArg::Auto => PairOracleKind::Auto,
        PairOracleArg::EdgeUcb => PairOracleKind::EdgeUcb,
        PairOracleArg::LayeredGreedy => PairOracleKind::LayeredGreedy,
        PairOracleArg::EpsilonNet => PairOracleKind::EpsilonNet {
            epsilon: a.epsilon,
            cap: a.net_cap,
        },
    };
    let oracle = ConfiguredPairOracle {
        kind,
        im: ConfiguredImOracle {
            model: Model::Lt,
            kind: ImOracleKind::Exact,
        },
        mode: if a.box_clipped {
            BoxMode::BoxClipped
        } else {
            BoxMode::EllipsoidOnly
        },
    };
    let pair = oracle.solve(&graph, &set, a.k)?;
    print_json(&serde_json::json!({ "pair": pair, "eta": oracle.eta(&graph, a.k) }))
}

fn run(config: &Path) -> Result<()> {
    let cfg = ExperimentConfig::load(config)?;
    let base = config.parent().unwrap_or(Path::new("."));
    let same = |p: &Path| std::fs::canonicalize(base.join(p)).ok() == std::fs::canonicalize(config).ok();
    if same(&cfg.output) || same(&cfg.summary_path()) {
        return Err(Error::InvalidConfig(format!(
            "outputs would overwrite the config {}; set \"summary\" or rename the config",
            config.display()
        )));
    }
    let result = run_experiment(&cfg, base)?;
    print_json(&result.summary)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::GenerateGraph(a) => generate_graph(a),
        Command::Run { config } => run(config),
        Command::GomCheck(a) => gom_check(a),
        Command::WcimSolve(a) => wcim_solve(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_cap_exceeded() { 2 } else { 1 })
        }
    }
}
