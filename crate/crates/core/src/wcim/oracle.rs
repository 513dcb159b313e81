//! PairOracles: solvers for `argmax_{S, w′ ∈ C} r(S, w′)`.

use super::confidence::ConfidenceSet;
use super::ellipsoid::{BoxMode, NodeEllipsoid};
use super::value::{bipartite_left, LayeredValue, SetValue};
use crate::combinatorics::subsets_between;
use crate::error::{Error, Result};
use crate::graph::{Graph, WeightVector, WEIGHT_SUM_TOLERANCE};
use crate::rng::SeedStream;
use crate::spread::{greedy_naive, ConfiguredImOracle, ImOracle, GREEDY_ALPHA, TIE_TOLERANCE};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default bound on the number of ε-net points.
pub const NET_CAP: f64 = 1e6;

pub const DEFAULT_EPSILON: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub seeds: Vec<usize>,
    /// Representative weights, per edge.
    pub weights: Vec<f64>,
    /// The optimistic value reported by the solver.
    pub value: f64,
}

/// Greedy over `value.ground()`: `k` additions of the largest marginal gain,
/// ties to the lowest id. The weights come from evaluating the final set.
pub fn greedy_pair_oracle(value: &impl SetValue, k: usize) -> Result<PairResult> {
    let ground = value.ground();
    let (picked, _) = greedy_naive(ground.len(), k, |idx| {
        let s: Vec<usize> = idx.iter().map(|&i| ground[i]).collect();
        value.value(&s)
    })?;
    let seeds: Vec<usize> = picked.iter().map(|&i| ground[i]).collect();
    let (v, weights) = value.evaluate(&seeds)?;
    Ok(PairResult {
        seeds,
        weights,
        value: v,
    })
}

/// Best set of size at most `k` by enumeration; ties go to the first set
/// in size-then-lexicographic order.
pub fn exhaustive_pair_opt(value: &impl SetValue, k: usize) -> Result<PairResult> {
    let ground = value.ground();
    let sets: Vec<Vec<usize>> = subsets_between(ground.len(), 0, k)
        .map(|idx| idx.iter().map(|&i| ground[i]).collect())
        .collect();
    let values: Vec<f64> = sets.par_iter().map(|s| value.value(s)).collect::<Result<_>>()?;
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let i = values.iter().position(|&v| v >= best - TIE_TOLERANCE).unwrap();
    let (v, weights) = value.evaluate(&sets[i])?;
    Ok(PairResult {
        seeds: sets[i].clone(),
        weights,
        value: v,
    })
}

/// Per-edge upper confidence bounds `U(e) = min(1, ŵ + ρ/√M)`, valid when
/// every ellipsoid is one-dimensional.
pub fn edge_ucb_weights(graph: &Graph, set: &ConfidenceSet) -> Result<Vec<f64>> {
    if let Some(v) = (0..graph.n()).find(|&v| graph.in_degree(v) > 1) {
        return Err(Error::IndegreeTooLarge {
            node: v,
            degree: graph.in_degree(v),
            max: 1,
        });
    }
    let mut u = vec![0.0; graph.m()];
    for ell in set.iter() {
        let e = graph.in_edges(ell.node()).start;
        u[e] = (ell.estimate()[0] + ell.half_widths()[0]).clamp(0.0, 1.0);
    }
    Ok(u)
}

pub fn pair_oracle_edge_ucb(graph: &Graph, set: &ConfidenceSet, k: usize, im: &impl ImOracle) -> Result<PairResult> {
    let u = edge_ucb_weights(graph, set)?;
    let r = im.solve(graph, &WeightVector::new(graph, u.clone())?, k)?;
    Ok(PairResult {
        seeds: r.seeds,
        weights: u,
        value: r.value,
    })
}

/// Grid over the bounding box of one ellipsoid intersected with `[0, 1]`,
/// anchored at the (clamped) center with the given pitch and including
/// both box endpoints, keeping points that lie in the ellipsoid and whose
/// coordinates sum to at most one. Anchoring at the center keeps a feasible
/// center in the net however small the ellipsoid is. Fails with
/// [`Error::NetTooLarge`] when the raw grid exceeds `cap`.
pub fn node_net(ell: &NodeEllipsoid, pitch: f64, cap: f64) -> Result<Vec<Vec<f64>>> {
    let center = ell.estimate();
    let axes: Vec<Vec<f64>> = ell
        .half_widths()
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            let lo = (center[i] - h).max(0.0);
            let hi = (center[i] + h).min(1.0);
            if lo > hi {
                return Vec::new();
            }
            let anchor = center[i].clamp(lo, hi);
            if hi - lo <= 0.0 || pitch <= 0.0 {
                return vec![anchor];
            }
            let below = ((anchor - lo) / pitch).floor() as usize;
            let above = ((hi - anchor) / pitch).floor() as usize;
            let mut axis = Vec::with_capacity(below + above + 3);
            if anchor - below as f64 * pitch - lo > 1e-12 {
                axis.push(lo);
            }
            axis.extend((0..=below).rev().map(|j| anchor - j as f64 * pitch));
            axis.extend((1..=above).map(|j| anchor + j as f64 * pitch));
            if hi - axis[axis.len() - 1] > 1e-12 {
                axis.push(hi);
            }
            axis
        })
        .collect();
    let raw: f64 = axes.iter().map(|a| a.len() as f64).product();
    if raw > cap {
        return Err(Error::NetTooLarge { required: raw, cap });
    }
    let mut points = Vec::new();
    let mut idx = vec![0usize; axes.len()];
    if axes.iter().any(|a| a.is_empty()) {
        return Ok(points);
    }
    loop {
        let p: Vec<f64> = idx.iter().zip(&axes).map(|(&j, a)| a[j]).collect();
        if p.iter().sum::<f64>() <= 1.0 + WEIGHT_SUM_TOLERANCE && ell.contains(&p, BoxMode::BoxClipped) {
            points.push(p);
        }
        let mut d = 0;
        loop {
            if d == axes.len() {
                return Ok(points);
            }
            idx[d] += 1;
            if idx[d] < axes[d].len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Fallback when a node's net is empty: the center, clipped to the box and
/// rescaled to a valid in-weight vector.
fn feasible_center(ell: &NodeEllipsoid) -> Vec<f64> {
    let mut p: Vec<f64> = ell.estimate().iter().map(|x| x.clamp(0.0, 1.0)).collect();
    let s: f64 = p.iter().sum();
    if s > 1.0 {
        p.iter_mut().for_each(|x| *x /= s);
    }
    p
}

/// ε-net PairOracle: enumerate a grid of pitch `ε/√m` over `C`, call the IM
/// oracle on every grid point, keep the best pair.
pub fn epsilon_net_pair_oracle(
    graph: &Graph,
    set: &ConfidenceSet,
    k: usize,
    epsilon: f64,
    im: &impl ImOracle,
    cap: f64,
) -> Result<PairResult> {
    let dim = set.dim().max(1);
    let pitch = epsilon / (dim as f64).sqrt();
    let mut nets: Vec<(usize, Vec<Vec<f64>>)> = Vec::new();
    for ell in set.iter() {
        let net = node_net(ell, pitch, cap)?;
        let net = if net.is_empty() { vec![feasible_center(ell)] } else { net };
        nets.push((ell.node(), net));
    }
    let required: f64 = nets.iter().map(|(_, n)| n.len() as f64).product();
    if required > cap {
        return Err(Error::NetTooLarge { required, cap });
    }
    let total = required as u64;
    let assemble = |mut index: u64| {
        let mut w = vec![0.0; graph.m()];
        for (v, net) in &nets {
            let j = (index % net.len() as u64) as usize;
            index /= net.len() as u64;
            w[graph.in_edges(*v)].copy_from_slice(&net[j]);
        }
        w
    };
    let results: Vec<(f64, Vec<usize>)> = (0..total)
        .into_par_iter()
        .map(|i| {
            let w = WeightVector::new(graph, assemble(i))?;
            let r = im.solve(graph, &w, k)?;
            Ok((r.value, r.seeds))
        })
        .collect::<Result<_>>()?;
    let best = results.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let i = results.iter().position(|r| r.0 >= best - TIE_TOLERANCE).unwrap();
    Ok(PairResult {
        seeds: results[i].1.clone(),
        weights: assemble(i as u64),
        value: results[i].0,
    })
}

/// A solver for the pair problem, with its declared approximation factor.
pub trait PairOracle: Sync {
    fn solve(&self, graph: &Graph, set: &ConfidenceSet, k: usize) -> Result<PairResult>;

    /// `α · β` of the oracle on this graph.
    fn eta(&self, graph: &Graph, k: usize) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairOracleKind {
    /// Edge-UCB when every in-degree is at most one, layered greedy
    /// otherwise, falling back to the ε-net when the layering fails.
    #[default]
    Auto,
    EdgeUcb,
    LayeredGreedy,
    EpsilonNet {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default = "default_net_cap")]
        cap: f64,
    },
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_net_cap() -> f64 {
    NET_CAP
}

/// A [`PairOracleKind`] bound to an IM oracle and a box mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfiguredPairOracle {
    pub kind: PairOracleKind,
    pub im: ConfiguredImOracle,
    pub mode: BoxMode,
}

impl ConfiguredPairOracle {
    fn im_eta(&self) -> f64 {
        self.im.alpha()
    }

    fn layered_alpha(graph: &Graph, k: usize) -> f64 {
        if k <= 1 {
            1.0
        } else if bipartite_left(graph).is_ok() && graph.max_in_degree() <= 2 {
            GREEDY_ALPHA
        } else {
            1.0 / k as f64
        }
    }

    fn resolve(&self, graph: &Graph) -> PairOracleKind {
        match self.kind {
            PairOracleKind::Auto if graph.max_in_degree() <= 1 => PairOracleKind::EdgeUcb,
            PairOracleKind::Auto if graph.is_acyclic() => PairOracleKind::LayeredGreedy,
            PairOracleKind::Auto => PairOracleKind::EpsilonNet {
                epsilon: DEFAULT_EPSILON,
                cap: NET_CAP,
            },
            other => other,
        }
    }
}

impl PairOracle for ConfiguredPairOracle {
    fn solve(&self, graph: &Graph, set: &ConfidenceSet, k: usize) -> Result<PairResult> {
        match self.resolve(graph) {
            PairOracleKind::EdgeUcb => pair_oracle_edge_ucb(graph, set, k, &self.im),
            PairOracleKind::LayeredGreedy => {
                let value = LayeredValue {
                    graph,
                    set,
                    mode: self.mode,
                };
                match greedy_pair_oracle(&value, k) {
                    Err(Error::NotADag) if self.kind == PairOracleKind::Auto => {
                        epsilon_net_pair_oracle(graph, set, k, DEFAULT_EPSILON, &self.im, NET_CAP)
                    }
                    other => other,
                }
            }
            PairOracleKind::EpsilonNet { epsilon, cap } => epsilon_net_pair_oracle(graph, set, k, epsilon, &self.im, cap),
            PairOracleKind::Auto => unreachable!("resolved above"),
        }
    }

    fn eta(&self, graph: &Graph, k: usize) -> f64 {
        match self.resolve(graph) {
            PairOracleKind::EdgeUcb => self.im_eta(),
            PairOracleKind::LayeredGreedy => Self::layered_alpha(graph, k),
            PairOracleKind::EpsilonNet { epsilon, .. } => {
                let slack = graph.m() as f64 * graph.n() as f64 * epsilon / k.max(1) as f64;
                self.im_eta() * (1.0 - slack).max(0.0)
            }
            PairOracleKind::Auto => unreachable!("resolved above"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub small: Vec<usize>,
    pub large: Vec<usize>,
    pub node: usize,
    /// `r(S ∪ {u}) − r(S)`.
    pub gain_small: f64,
    /// `r(S′ ∪ {u}) − r(S′)`.
    pub gain_large: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeMode {
    /// Every `S ⊆ S′ ⊆ ground` and `u ∈ ground ∖ S′`; needs `|ground| ≤ 16`.
    Exhaustive,
    Sampled {
        samples: usize,
        seed: u64,
    },
}

/// Marginal gains `(r(S ∪ {u}) − r(S), r(S′ ∪ {u}) − r(S′))`.
pub fn marginal_gains<F>(value: &F, small: &[usize], large: &[usize], u: usize) -> Result<(f64, f64)>
where
    F: Fn(&[usize]) -> Result<f64>,
{
    let with = |s: &[usize]| {
        let mut t = s.to_vec();
        t.push(u);
        t.sort_unstable();
        t
    };
    Ok((value(&with(small))? - value(small)?, value(&with(large))? - value(large)?))
}

/// Searches for violations of `r(S ∪ {u}) − r(S) ≥ r(S′ ∪ {u}) − r(S′)`.
pub fn submodularity_probe<F>(value: F, ground: &[usize], mode: ProbeMode) -> Result<ProbeReport>
where
    F: Fn(&[usize]) -> Result<f64> + Sync,
{
    let g = ground.len();
    let set_of = |mask: u32| -> Vec<usize> { (0..g).filter(|i| mask >> i & 1 == 1).map(|i| ground[i]).collect() };
    let mut violations = Vec::new();
    let mut checked = 0;
    match mode {
        ProbeMode::Exhaustive => {
            if g > 16 {
                return Err(Error::EnumerationTooLarge {
                    what: "subsets for the submodularity probe",
                    required: 2f64.powi(g as i32),
                    cap: 65536.0,
                });
            }
            let values: Vec<f64> = (0..1u32 << g)
                .into_par_iter()
                .map(|m| value(&set_of(m)))
                .collect::<Result<_>>()?;
            let full = (1u32 << g) - 1;
            for large in 0..=full {
                let mut small = large;
                loop {
                    for u in (0..g).filter(|u| large >> u & 1 == 0) {
                        checked += 1;
                        let gs = values[(small | 1 << u) as usize] - values[small as usize];
                        let gl = values[(large | 1 << u) as usize] - values[large as usize];
                        if gs < gl - TIE_TOLERANCE {
                            violations.push(Violation {
                                small: set_of(small),
                                large: set_of(large),
                                node: ground[u],
                                gain_small: gs,
                                gain_large: gl,
                            });
                        }
                    }
                    if small == 0 {
                        break;
                    }
                    small = (small - 1) & large;
                }
            }
        }
        ProbeMode::Sampled { samples, seed } => {
            let mut rng = SeedStream::new(seed).rng();
            for _ in 0..samples {
                if g == 0 {
                    break;
                }
                let mut order = ground.to_vec();
                order.shuffle(&mut rng);
                let u = order[0];
                let mut large: Vec<usize> = order[1..].iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                let mut small: Vec<usize> = large.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                large.sort_unstable();
                small.sort_unstable();
                let (gs, gl) = marginal_gains(&value, &small, &large, u)?;
                checked += 1;
                if gs < gl - TIE_TOLERANCE {
                    violations.push(Violation {
                        small,
                        large,
                        node: u,
                        gain_small: gs,
                        gain_large: gl,
                    });
                }
            }
        }
    }
    Ok(ProbeReport { checked, violations })
}
