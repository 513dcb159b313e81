//! Reference implementations and generators shared by the integration
//! tests. Everything here is written independently of the library's
//! enumeration code so it can serve as an oracle.
#![allow(dead_code)]

use ltoim::graph::{Graph, WeightVector};
use proptest::prelude::*;
use rand::Rng;

/// Every LT live-edge world with no pruning: each node picks one of its
/// in-edges or nothing. Calls `f(probability, activation_times)`.
pub fn for_each_lt_world(g: &Graph, w: &WeightVector, seeds: &[usize], mut f: impl FnMut(f64, &[Option<usize>])) {
    let n = g.n();
    let options: Vec<Vec<(Option<usize>, f64)>> = (0..n)
        .map(|v| {
            let mut o: Vec<(Option<usize>, f64)> = g.in_edges(v).map(|e| (Some(e), w.get(e))).collect();
            o.push((None, 1.0 - o.iter().map(|x| x.1).sum::<f64>()));
            o
        })
        .collect();
    let mut pick = vec![0usize; n];
    loop {
        let prob: f64 = (0..n).map(|v| options[v][pick[v]].1).product();
        if prob > 0.0 {
            let chosen: Vec<Option<usize>> = (0..n).map(|v| options[v][pick[v]].0).collect();
            f(prob, &bfs_times(g, seeds, &chosen));
        }
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            pick[i] += 1;
            if pick[i] < options[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// Activation times when node `v` listens only to edge `chosen[v]`.
fn bfs_times(g: &Graph, seeds: &[usize], chosen: &[Option<usize>]) -> Vec<Option<usize>> {
    let mut times = vec![None; g.n()];
    for &s in seeds {
        times[s] = Some(0);
    }
    let mut t = 0;
    loop {
        let mut changed = false;
        for v in 0..g.n() {
            if times[v].is_none() {
                if let Some(e) = chosen[v] {
                    if times[g.source(e)] == Some(t) {
                        times[v] = Some(t + 1);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return times;
        }
        t += 1;
    }
}

pub fn naive_marginals(g: &Graph, w: &WeightVector, seeds: &[usize]) -> Vec<f64> {
    let mut p = vec![0.0; g.n()];
    for_each_lt_world(g, w, seeds, |prob, times| {
        for (x, t) in p.iter_mut().zip(times) {
            if t.is_some() {
                *x += prob;
            }
        }
    });
    p
}

pub fn naive_spread(g: &Graph, w: &WeightVector, seeds: &[usize]) -> f64 {
    naive_marginals(g, w, seeds).iter().sum()
}

/// Raw edges for a random graph on `n` nodes; `acyclic` keeps only `i < j`.
pub fn graph_strategy(min_n: usize, max_n: usize, acyclic: bool) -> impl Strategy<Value = (Graph, WeightVector)> {
    (min_n..=max_n)
        .prop_flat_map(move |n| (Just(n), prop::collection::vec((any::<bool>(), 0.0..1.0f64), n * n)))
        .prop_map(move |(n, cells)| {
            let mut pairs = Vec::new();
            let mut raw = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let (keep, x) = cells[i * n + j];
                    if keep && i != j && (!acyclic || i < j) {
                        pairs.push((i, j));
                        raw.push(x);
                    }
                }
            }
            let g = Graph::new(n, &pairs).unwrap();
            let mut values = vec![0.0; g.m()];
            for (&(i, j), &x) in pairs.iter().zip(&raw) {
                values[g.edge_id(i, j).unwrap()] = x;
            }
            let w = WeightVector::normalized(&g, values).unwrap();
            (g, w)
        })
}

/// Random valid weights on an existing graph.
pub fn random_weights(g: &Graph, rng: &mut impl Rng) -> WeightVector {
    WeightVector::normalized(g, (0..g.m()).map(|_| rng.gen::<f64>()).collect()).unwrap()
}

/// A random graph on `n` nodes, each allowed pair present with probability `p`.
pub fn random_graph(n: usize, p: f64, acyclic: bool, rng: &mut impl Rng) -> (Graph, WeightVector) {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && (!acyclic || i < j) && rng.gen::<f64>() < p {
                pairs.push((i, j));
            }
        }
    }
    let g = Graph::new(n, &pairs).unwrap();
    let w = random_weights(&g, rng);
    (g, w)
}

/// A random non-empty seed set of size at most `k`.
pub fn random_seeds(n: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let size = rng.gen_range(1..=k.min(n));
    let mut all: Vec<usize> = (0..n).collect();
    for i in 0..size {
        let j = rng.gen_range(i..n);
        all.swap(i, j);
    }
    let mut s = all[..size].to_vec();
    s.sort_unstable();
    s
}

/// Inverse of a small SPD matrix by Gauss–Jordan elimination.
pub fn gauss_jordan_inverse(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..d).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..d {
        let p = (c..d).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        a.swap(c, p);
        let pivot = a[c][c];
        for x in a[c].iter_mut() {
            *x /= pivot;
        }
        for r in 0..d {
            if r != c {
                let f = a[r][c];
                let row_c = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(row_c) {
                    *x -= f * y;
                }
            }
        }
    }
    a.into_iter().map(|r| r[d..].to_vec()).collect()
}
