//! Weight-constrained influence maximization: optimizing jointly over seed
//! sets and weight vectors inside a product of confidence ellipsoids.

mod confidence;
mod ellipsoid;
mod oracle;
mod value;

pub use confidence::ConfidenceSet;
pub use ellipsoid::{spd_inverse, BoxMode, LinearMax, NodeEllipsoid, PIVOT_TOLERANCE};
pub use oracle::{
    edge_ucb_weights, epsilon_net_pair_oracle, exhaustive_pair_opt, greedy_pair_oracle, marginal_gains, node_net,
    pair_oracle_edge_ucb, submodularity_probe, ConfiguredPairOracle, PairOracle, PairOracleKind, PairResult, ProbeMode,
    ProbeReport, Violation, DEFAULT_EPSILON, NET_CAP,
};
pub use value::{
    bipartite_left, bipartite_value, wcim_value_dag, BipartiteConvention, BipartiteValue, DagValue, LayeredValue, SetValue,
};
