use super::ellipsoid::{BoxMode, NodeEllipsoid};
use crate::error::{Error, Result};
use crate::graph::{Graph, FORMAT_VERSION};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// The product set `C = ∏_v C_v`: one ellipsoid per node with in-degree at
/// least one, over that node's in-edges in `N(v)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceSet {
    ellipsoids: Vec<Option<NodeEllipsoid>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EllipsoidJson {
    #[serde(rename = "M")]
    m: Vec<Vec<f64>>,
    b: Vec<f64>,
    rho: f64,
}

impl ConfidenceSet {
    pub fn new(graph: &Graph, ellipsoids: Vec<NodeEllipsoid>) -> Result<Self> {
        let mut slots: Vec<Option<NodeEllipsoid>> = vec![None; graph.n()];
        for e in ellipsoids {
            let v = e.node();
            if v >= graph.n() {
                return Err(Error::NodeOutOfRange { id: v, n: graph.n() });
            }
            if e.dim() != graph.in_degree(v) {
                return Err(Error::DimensionMismatch {
                    node: v,
                    expected: graph.in_degree(v),
                    actual: e.dim(),
                });
            }
            slots[v] = Some(e);
        }
        if let Some(v) = (0..graph.n()).find(|&v| graph.in_degree(v) > 0 && slots[v].is_none()) {
            return Err(Error::MissingEllipsoid(v));
        }
        Ok(Self { ellipsoids: slots })
    }

    /// `M = I`, `b = 0` and a common radius for every node.
    pub fn uninformative(graph: &Graph, rho: f64) -> Self {
        Self {
            ellipsoids: (0..graph.n())
                .map(|v| (graph.in_degree(v) > 0).then(|| NodeEllipsoid::identity(v, graph.in_degree(v), rho)))
                .collect(),
        }
    }

    pub fn get(&self, v: usize) -> Option<&NodeEllipsoid> {
        self.ellipsoids[v].as_ref()
    }

    pub fn iter(&self) -> impl Iterator<Item = &NodeEllipsoid> {
        self.ellipsoids.iter().flatten()
    }

    /// Total dimension, i.e. the number of edges covered.
    pub fn dim(&self) -> usize {
        self.iter().map(|e| e.dim()).sum()
    }

    /// Centers `ŵ` laid out as a per-edge vector.
    pub fn estimate(&self, graph: &Graph) -> Vec<f64> {
        let mut w = vec![0.0; graph.m()];
        for e in self.iter() {
            let range = graph.in_edges(e.node());
            w[range].copy_from_slice(e.estimate().as_slice());
        }
        w
    }

    /// Whether a per-edge weight vector lies in every `C_v`.
    pub fn contains(&self, graph: &Graph, w: &[f64], mode: BoxMode) -> bool {
        self.iter().all(|e| e.contains(&w[graph.in_edges(e.node())], mode))
    }

    /// Parses `{"<node>": {"M": [[...]], "b": [...], "rho": r}, ...}` with an
    /// optional top-level `"format_version"`.
    pub fn from_json(graph: &Graph, text: &str) -> Result<Self> {
        let raw: BTreeMap<String, serde_json::Value> = serde_json::from_str(text)?;
        let mut ellipsoids = Vec::new();
        for (key, value) in raw {
            if key == "format_version" {
                let version = value
                    .as_u64()
                    .ok_or_else(|| Error::InvalidConfig("format_version must be an integer".into()))?;
                if version != FORMAT_VERSION {
                    return Err(Error::UnsupportedFormat(version));
                }
                continue;
            }
            let node: usize = key
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("confidence set key {key:?} is not a node id")))?;
            let entry: EllipsoidJson = serde_json::from_value(value)?;
            let d = entry.b.len();
            if entry.m.len() != d || entry.m.iter().any(|row| row.len() != d) {
                return Err(Error::DimensionMismatch {
                    node,
                    expected: d,
                    actual: entry.m.len(),
                });
            }
            let m = DMatrix::from_row_iterator(d, d, entry.m.into_iter().flatten());
            ellipsoids.push(NodeEllipsoid::new(node, m, DVector::from_vec(entry.b), entry.rho)?);
        }
        Self::new(graph, ellipsoids)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut out = serde_json::Map::new();
        out.insert("format_version".into(), FORMAT_VERSION.into());
        for e in self.iter() {
            let d = e.dim();
            let entry = EllipsoidJson {
                m: (0..d).map(|i| (0..d).map(|j| e.gramian()[(i, j)]).collect()).collect(),
                b: e.moment().iter().copied().collect(),
                rho: e.rho(),
            };
            out.insert(e.node().to_string(), serde_json::to_value(entry)?);
        }
        Ok(serde_json::to_string_pretty(&out)?)
    }

    pub fn load(path: impl AsRef<Path>, graph: &Graph) -> Result<Self> {
        Self::from_json(graph, &std::fs::read_to_string(path)?)
    }
}
