use super::{build_graph_with_nodes, Graph, WeightVector};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const FORMAT_VERSION: u64 = 1;

fn default_version() -> u64 {
    FORMAT_VERSION
}

/// On-disk graph: `{"format_version": 1, "n": 3, "edges": [[0, 1, 0.5], ...]}`.
///
/// Weight files use the same schema; their edge list must match the graph's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    #[serde(default = "default_version")]
    pub format_version: u64,
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl GraphFile {
    pub fn from_graph(graph: &Graph, weights: &WeightVector) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            n: graph.n(),
            edges: graph.edges().zip(weights.as_slice()).map(|((s, t), &w)| (s, t, w)).collect(),
        }
    }

    pub fn into_graph(self) -> Result<(Graph, WeightVector)> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::UnsupportedFormat(self.format_version));
        }
        build_graph_with_nodes(self.n, &self.edges)
    }

    /// Interprets this file as a weight vector on an existing graph.
    pub fn weights_for(&self, graph: &Graph) -> Result<WeightVector> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::UnsupportedFormat(self.format_version));
        }
        if self.edges.len() != graph.m() {
            return Err(Error::WeightLengthMismatch {
                expected: graph.m(),
                actual: self.edges.len(),
            });
        }
        let mut values = vec![f64::NAN; graph.m()];
        for &(source, target, w) in &self.edges {
            let e = graph.edge_id(source, target).ok_or(Error::UnknownEdge {
                from: source,
                to: target,
            })?;
            if !values[e].is_nan() {
                return Err(Error::DuplicateEdge {
                    from: source,
                    to: target,
                });
            }
            values[e] = w;
        }
        WeightVector::new(graph, values)
    }
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<(Graph, WeightVector)> {
    let text = std::fs::read_to_string(path)?;
    let file: GraphFile = serde_json::from_str(&text)?;
    file.into_graph()
}

pub fn load_weights_for(path: impl AsRef<Path>, graph: &Graph) -> Result<WeightVector> {
    let text = std::fs::read_to_string(path)?;
    let file: GraphFile = serde_json::from_str(&text)?;
    file.weights_for(graph)
}

pub fn save_graph(path: impl AsRef<Path>, graph: &Graph, weights: &WeightVector) -> Result<()> {
    let text = serde_json::to_string_pretty(&GraphFile::from_graph(graph, weights))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    #[test]
    fn file_round_trip() {
        let (g, w) = build_graph(&[(2, 1, 0.25), (0, 1, 0.5), (1, 3, 1.0)]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        save_graph(&path, &g, &w).unwrap();
        let (g2, w2) = load_graph(&path).unwrap();
        assert_eq!(g, g2);
        assert_eq!(w, w2);
    }

    #[test]
    fn loader_enforces_invariants() {
        let bad: GraphFile = serde_json::from_str(r#"{"n": 3, "edges": [[0,2,0.7],[1,2,0.7]]}"#).unwrap();
        assert!(matches!(bad.into_graph(), Err(Error::WeightSumExceedsOne { node: 2, .. })));
        let v2: GraphFile = serde_json::from_str(r#"{"format_version": 2, "n": 2, "edges": []}"#).unwrap();
        assert!(matches!(v2.into_graph(), Err(Error::UnsupportedFormat(2))));
    }

    #[test]
    fn weights_must_match_edge_set() {
        let (g, _) = build_graph(&[(0, 1, 0.5)]).unwrap();
        let other: GraphFile = serde_json::from_str(r#"{"n": 2, "edges": [[1,0,0.5]]}"#).unwrap();
        assert!(matches!(other.weights_for(&g), Err(Error::UnknownEdge { .. })));
        let ok: GraphFile = serde_json::from_str(r#"{"n": 2, "edges": [[0,1,0.2]]}"#).unwrap();
        assert_eq!(ok.weights_for(&g).unwrap().as_slice(), &[0.2]);
    }
}
