use super::{Graph, WeightVector};
use crate::error::{Error, Result};
use crate::rng::{Purpose, SeedStream};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Graph families. Edges point "forward" (away from the root, left to
/// right, low id to high id); [`Orientation`] flips or doubles them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `pairs` disjoint edges `2i -> 2i+1`.
    Bar {
        pairs: usize,
    },
    Chain {
        n: usize,
    },
    /// Center 0 with edges to `1..n`.
    Star {
        n: usize,
    },
    /// Center 0 with `rays` chains of `length` nodes each.
    Ray {
        rays: usize,
        length: usize,
    },
    /// Complete binary out-tree on `n` nodes (heap numbering).
    Tree {
        n: usize,
    },
    /// Edges right and down on a `rows x cols` lattice.
    Grid {
        rows: usize,
        cols: usize,
    },
    /// Every ordered pair.
    Complete {
        n: usize,
    },
    /// Left nodes `0..left`, right nodes `left..left+right`, each
    /// left-to-right edge present with probability `p`.
    Bipartite {
        left: usize,
        right: usize,
        p: f64,
    },
    /// Each `i -> j` with `i < j` present with probability `p`.
    Dag {
        n: usize,
        p: f64,
    },
    /// Each ordered pair present with probability `p`.
    ErdosRenyi {
        n: usize,
        p: f64,
    },
}

impl Family {
    fn name(&self) -> &'static str {
        match self {
            Family::Bar { .. } => "bar",
            Family::Chain { .. } => "chain",
            Family::Star { .. } => "star",
            Family::Ray { .. } => "ray",
            Family::Tree { .. } => "tree",
            Family::Grid { .. } => "grid",
            Family::Complete { .. } => "complete",
            Family::Bipartite { .. } => "bipartite",
            Family::Dag { .. } => "dag",
            Family::ErdosRenyi { .. } => "erdos_renyi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    #[default]
    Forward,
    Reverse,
    /// Each undirected edge becomes a pair of opposite directed edges.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightRule {
    Constant(f64),
    /// Uniform draws, rescaled per node only when their sum exceeds one.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFamilyParams {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub orientation: Orientation,
    pub weights: WeightRule,
    #[serde(default)]
    pub seed: u64,
}

fn too_small(family: &Family, reason: &str) -> Error {
    Error::UnsupportedFamilySize {
        family: family.name(),
        reason: reason.to_string(),
    }
}

fn check_probability(family: &Family, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(too_small(family, "edge probability must lie in [0, 1]"))
    }
}

fn structure(family: &Family, rng: &mut impl Rng) -> Result<(usize, Vec<(usize, usize)>)> {
    let out = match *family {
        Family::Bar { pairs } => {
            if pairs == 0 {
                return Err(too_small(family, "pairs must be positive"));
            }
            (2 * pairs, (0..pairs).map(|i| (2 * i, 2 * i + 1)).collect())
        }
        Family::Chain { n } => {
            if n == 0 {
                return Err(too_small(family, "n must be positive"));
            }
            (n, (1..n).map(|i| (i - 1, i)).collect())
        }
        Family::Star { n } => {
            if n < 2 {
                return Err(too_small(family, "a star needs at least 2 nodes"));
            }
            (n, (1..n).map(|i| (0, i)).collect())
        }
        Family::Ray { rays, length } => {
            if rays == 0 || length == 0 {
                return Err(too_small(family, "rays and length must be positive"));
            }
            let mut edges = Vec::new();
            for r in 0..rays {
                let first = 1 + r * length;
                edges.push((0, first));
                for j in 1..length {
                    edges.push((first + j - 1, first + j));
                }
            }
            (1 + rays * length, edges)
        }
        Family::Tree { n } => {
            if n == 0 {
                return Err(too_small(family, "n must be positive"));
            }
            (n, (1..n).map(|i| ((i - 1) / 2, i)).collect())
        }
        Family::Grid { rows, cols } => {
            if rows == 0 || cols == 0 {
                return Err(too_small(family, "rows and cols must be positive"));
            }
            let id = |r: usize, c: usize| r * cols + c;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        edges.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            (rows * cols, edges)
        }
        Family::Complete { n } => {
            if n == 0 {
                return Err(too_small(family, "n must be positive"));
            }
            let edges = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .collect();
            (n, edges)
        }
        Family::Bipartite { left, right, p } => {
            if left == 0 || right == 0 {
                return Err(too_small(family, "both partitions must be nonempty"));
            }
            check_probability(family, p)?;
            let mut edges = Vec::new();
            for u in 0..left {
                for v in left..left + right {
                    if rng.gen::<f64>() < p {
                        edges.push((u, v));
                    }
                }
            }
            (left + right, edges)
        }
        Family::Dag { n, p } => {
            if n == 0 {
                return Err(too_small(family, "n must be positive"));
            }
            check_probability(family, p)?;
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen::<f64>() < p {
                        edges.push((i, j));
                    }
                }
            }
            (n, edges)
        }
        Family::ErdosRenyi { n, p } => {
            if n == 0 {
                return Err(too_small(family, "n must be positive"));
            }
            check_probability(family, p)?;
            let mut edges = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j && rng.gen::<f64>() < p {
                        edges.push((i, j));
                    }
                }
            }
            (n, edges)
        }
    };
    Ok(out)
}

fn orient(edges: Vec<(usize, usize)>, orientation: Orientation) -> Vec<(usize, usize)> {
    match orientation {
        Orientation::Forward => edges,
        Orientation::Reverse => edges.into_iter().map(|(s, t)| (t, s)).collect(),
        Orientation::Both => {
            let mut all: Vec<(usize, usize)> = edges.iter().flat_map(|&(s, t)| [(s, t), (t, s)]).collect();
            all.sort_unstable();
            all.dedup();
            all
        }
    }
}

/// Generates a member of the requested family; deterministic in `seed`.
pub fn generate(params: &GraphFamilyParams) -> Result<(Graph, WeightVector)> {
    let mut rng = SeedStream::new(params.seed).purpose(Purpose::Generator).rng();
    let (n, edges) = structure(&params.family, &mut rng)?;
    let edges = orient(edges, params.orientation);
    let graph = Graph::new(n, &edges)?;
    let weights = match params.weights {
        WeightRule::Constant(w) => WeightVector::new(&graph, vec![w; graph.m()])?,
        WeightRule::Uniform => {
            let raw = (0..graph.m()).map(|_| rng.gen::<f64>()).collect();
            WeightVector::normalized(&graph, raw)?
        }
    };
    Ok((graph, weights))
}
