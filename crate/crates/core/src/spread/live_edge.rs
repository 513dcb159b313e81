//! Exhaustive enumeration of live-edge worlds.
//!
//! Under LT each node keeps at most one in-edge, chosen with probability
//! equal to its weight; under IC every edge is live independently. A world
//! fixes the live edges, and the activation time of a node is its
//! breadth-first distance from the seeds over live edges. Step by step this
//! reproduces the law of the activation-set sequence, not only of the final
//! set, so any functional of a trace can be averaged exactly.
//!
//! Only the choices that can matter are enumerated: units attached to nodes
//! unreachable from the seeds are marginalized out, in-edges of seeds are
//! ignored, and zero-probability options are dropped.

use crate::diffusion::Model;
use crate::error::{Error, Result};
use crate::graph::{reachable_from, EdgeId, Graph, WeightVector};
use rayon::prelude::*;
use std::collections::VecDeque;

/// Default bound on the number of worlds enumerated.
pub const LIVE_EDGE_CAP: f64 = 1e7;

const CHUNKS: u64 = 128;

#[derive(Debug, Clone)]
pub struct LiveEdgeWorlds<'g> {
    graph: &'g Graph,
    seeds: Vec<usize>,
    /// One entry per independent choice; each option lists the edge it
    /// makes live (if any) and its probability.
    units: Vec<Vec<(Option<EdgeId>, f64)>>,
    count: u64,
}

impl<'g> LiveEdgeWorlds<'g> {
    pub fn new(model: Model, graph: &'g Graph, weights: &WeightVector, seeds: &[usize], cap: f64) -> Result<Self> {
        for &s in seeds {
            if s >= graph.n() {
                return Err(Error::NodeOutOfRange { id: s, n: graph.n() });
            }
        }
        let reach = reachable_from(graph, seeds);
        let mut is_seed = vec![false; graph.n()];
        for &s in seeds {
            is_seed[s] = true;
        }
        let mut units = Vec::new();
        match model {
            Model::Lt => {
                for v in (0..graph.n()).filter(|&v| reach[v] && !is_seed[v]) {
                    let mut options: Vec<(Option<EdgeId>, f64)> = graph
                        .in_edges(v)
                        .filter(|&e| reach[graph.source(e)] && weights.get(e) > 0.0)
                        .map(|e| (Some(e), weights.get(e)))
                        .collect();
                    let rest = 1.0 - options.iter().map(|o| o.1).sum::<f64>();
                    if rest > 0.0 {
                        options.push((None, rest));
                    }
                    if !(options.len() == 1 && options[0].0.is_none()) {
                        units.push(options);
                    }
                }
            }
            Model::Ic => {
                for e in 0..graph.m() {
                    let (u, v) = graph.edge(e);
                    let p = weights.get(e);
                    if !reach[u] || is_seed[v] || p <= 0.0 {
                        continue;
                    }
                    if p >= 1.0 {
                        units.push(vec![(Some(e), 1.0)]);
                    } else {
                        units.push(vec![(Some(e), p), (None, 1.0 - p)]);
                    }
                }
            }
        }
        let required: f64 = units.iter().map(|u| u.len() as f64).product();
        if required > cap {
            return Err(Error::EnumerationTooLarge {
                what: "live-edge worlds",
                required,
                cap,
            });
        }
        let mut seeds = seeds.to_vec();
        seeds.sort_unstable();
        seeds.dedup();
        Ok(Self {
            graph,
            seeds,
            units,
            count: required as u64,
        })
    }

    /// Number of worlds that will be visited.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// `Σ_world P(world) · f(times)` for a vector-valued `f`. `f` receives
    /// per-node activation times and writes into a zeroed buffer of length
    /// `dim`. Summation order is fixed, so the result does not depend on
    /// the thread pool.
    pub fn expectation<F>(&self, dim: usize, f: F) -> Vec<f64>
    where
        F: Fn(&[Option<usize>], &mut [f64]) + Sync,
    {
        let partials: Vec<Vec<f64>> = self.par_chunks(|lo, hi| {
            let mut acc = vec![0.0; dim];
            let mut out = vec![0.0; dim];
            self.visit(lo, hi, |prob, times| {
                out.iter_mut().for_each(|x| *x = 0.0);
                f(times, &mut out);
                for (a, x) in acc.iter_mut().zip(&out) {
                    *a += prob * x;
                }
            });
            acc
        });
        let mut total = vec![0.0; dim];
        for p in partials {
            for (t, x) in total.iter_mut().zip(p) {
                *t += x;
            }
        }
        total
    }

    /// Scalar form of [`expectation`](Self::expectation).
    pub fn expect<F>(&self, f: F) -> f64
    where
        F: Fn(&[Option<usize>]) -> f64 + Sync,
    {
        self.expectation(1, |times, out| out[0] = f(times))[0]
    }

    /// `min_world f(times)` over worlds of positive probability.
    pub fn minimum<F>(&self, f: F) -> f64
    where
        F: Fn(&[Option<usize>]) -> f64 + Sync,
    {
        self.par_chunks(|lo, hi| {
            let mut best = f64::INFINITY;
            self.visit(lo, hi, |_, times| best = best.min(f(times)));
            best
        })
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }

    fn par_chunks<T: Send, F: Fn(u64, u64) -> T + Sync>(&self, f: F) -> Vec<T> {
        let chunks = CHUNKS.min(self.count.max(1));
        (0..chunks)
            .into_par_iter()
            .map(|c| f(self.count * c / chunks, self.count * (c + 1) / chunks))
            .collect()
    }

    /// Calls `f(probability, times)` for worlds `lo..hi` in counter order.
    fn visit<F>(&self, lo: u64, hi: u64, mut f: F)
    where
        F: FnMut(f64, &[Option<usize>]),
    {
        let g = self.graph;
        let mut digits = vec![0usize; self.units.len()];
        let mut rem = lo;
        for (d, unit) in digits.iter_mut().zip(&self.units) {
            *d = (rem % unit.len() as u64) as usize;
            rem /= unit.len() as u64;
        }
        let mut live = vec![false; g.m()];
        let mut times = vec![None; g.n()];
        let mut queue = VecDeque::new();
        for _ in lo..hi {
            let mut prob = 1.0;
            for (unit, &d) in self.units.iter().zip(&digits) {
                let (edge, p) = unit[d];
                prob *= p;
                if let Some(e) = edge {
                    live[e] = true;
                }
            }
            times.iter_mut().for_each(|t| *t = None);
            for &s in &self.seeds {
                times[s] = Some(0);
                queue.push_back(s);
            }
            while let Some(u) = queue.pop_front() {
                let next = times[u].map(|t| t + 1);
                for &e in g.out_edges(u) {
                    let v = g.target(e);
                    if live[e] && times[v].is_none() {
                        times[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            f(prob, &times);
            for (unit, &d) in self.units.iter().zip(&digits) {
                if let Some(e) = unit[d].0 {
                    live[e] = false;
                }
            }
            // advance the mixed-radix counter
            for (d, unit) in digits.iter_mut().zip(&self.units) {
                *d += 1;
                if *d < unit.len() {
                    break;
                }
                *d = 0;
            }
        }
    }
}

/// Per-node activation probabilities.
pub fn exact_marginals(model: Model, graph: &Graph, weights: &WeightVector, seeds: &[usize], cap: f64) -> Result<Vec<f64>> {
    let worlds = LiveEdgeWorlds::new(model, graph, weights, seeds, cap)?;
    Ok(worlds.expectation(graph.n(), |times, out| {
        for (o, t) in out.iter_mut().zip(times) {
            if t.is_some() {
                *o = 1.0;
            }
        }
    }))
}

/// Expected number of active nodes, by exhaustive enumeration.
pub fn exact_spread(model: Model, graph: &Graph, weights: &WeightVector, seeds: &[usize], cap: f64) -> Result<f64> {
    let worlds = LiveEdgeWorlds::new(model, graph, weights, seeds, cap)?;
    Ok(worlds.expect(|times| times.iter().filter(|t| t.is_some()).count() as f64))
}

/// Exact LT spread `r(S, w)` with the default cap.
pub fn exact_spread_lt(graph: &Graph, weights: &WeightVector, seeds: &[usize]) -> Result<f64> {
    exact_spread(Model::Lt, graph, weights, seeds, LIVE_EDGE_CAP)
}
