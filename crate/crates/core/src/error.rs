use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate edge {from} -> {to}")]
    DuplicateEdge { from: usize, to: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("node id {id} out of range for a graph with {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },

    #[error("in-weights of node {node} sum to {sum}, which exceeds 1")]
    WeightSumExceedsOne { node: usize, sum: f64 },

    #[error("weight {weight} on edge {from} -> {to} is outside [0, 1]")]
    WeightOutOfRange { from: usize, to: usize, weight: f64 },

    #[error("weight vector has {actual} entries, graph has {expected} edges")]
    WeightLengthMismatch { expected: usize, actual: usize },

    #[error("edge {from} -> {to} does not exist in the graph")]
    UnknownEdge { from: usize, to: usize },

    #[error("unsupported size for the {family} family: {reason}")]
    UnsupportedFamilySize { family: &'static str, reason: String },

    #[error("enumeration of {what} needs {required} cases, cap is {cap}")]
    EnumerationTooLarge { what: &'static str, required: f64, cap: f64 },

    #[error("epsilon-net would contain {required} points, cap is {cap}")]
    NetTooLarge { required: f64, cap: f64 },

    #[error("graph is not acyclic once in-edges to the seed set are removed")]
    NotADag,

    #[error("graph is not bipartite: node {0} has both incoming and outgoing edges")]
    NotBipartite(usize),

    #[error("seed {0} is not in the left partition")]
    SeedOutsideLeftPartition(usize),

    #[error("node {node} has in-degree {degree}, at most {max} is supported")]
    IndegreeTooLarge { node: usize, degree: usize, max: usize },

    #[error("Gramian of node {node} is not numerically positive definite (pivot {pivot:e})")]
    SingularGramian { node: usize, pivot: f64 },

    #[error("dimension mismatch for node {node}: expected {expected}, got {actual}")]
    DimensionMismatch { node: usize, expected: usize, actual: usize },

    #[error("no confidence ellipsoid for node {0}")]
    MissingEllipsoid(usize),

    #[error("failure probability {0} is outside (0, 1]")]
    InvalidDelta(f64),

    #[error("gap-dependent exploration budget requires a positive minimum gap")]
    MissingGap,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported format_version {0}")]
    UnsupportedFormat(u64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for the errors that signal an exceeded enumeration cap.
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(self, Error::EnumerationTooLarge { .. } | Error::NetTooLarge { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
