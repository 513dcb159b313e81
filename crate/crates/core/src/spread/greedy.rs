//! Greedy set selection with the crate-wide tie rule: take the largest
//! marginal gain, then the lowest node id among gains within
//! [`TIE_TOLERANCE`] of it.

use crate::error::Result;
use rayon::prelude::*;

pub const TIE_TOLERANCE: f64 = 1e-12;

/// Index of the chosen candidate among `(id, gain)` pairs.
fn pick(gains: &[(usize, f64)]) -> Option<usize> {
    let best = gains.iter().map(|g| g.1).fold(f64::NEG_INFINITY, f64::max);
    gains
        .iter()
        .filter(|g| g.1 >= best - TIE_TOLERANCE)
        .min_by_key(|g| g.0)
        .map(|g| g.0)
}

fn insert_sorted(set: &[usize], u: usize) -> Vec<usize> {
    let mut s = set.to_vec();
    let pos = s.partition_point(|&x| x < u);
    s.insert(pos, u);
    s
}

/// `k` rounds of full marginal-gain evaluation. Nodes are added even when
/// their gain is negative, so the result always has `min(k, n)` nodes.
pub fn greedy_naive<F>(n: usize, k: usize, value: F) -> Result<(Vec<usize>, f64)>
where
    F: Fn(&[usize]) -> Result<f64> + Sync,
{
    let mut set: Vec<usize> = Vec::new();
    let mut current = value(&set)?;
    for _ in 0..k.min(n) {
        let candidates: Vec<usize> = (0..n).filter(|u| set.binary_search(u).is_err()).collect();
        let values: Vec<(usize, f64)> = candidates
            .par_iter()
            .map(|&u| value(&insert_sorted(&set, u)).map(|v| (u, v)))
            .collect::<Result<_>>()?;
        let gains: Vec<(usize, f64)> = values.iter().map(|&(u, v)| (u, v - current)).collect();
        let u = pick(&gains).expect("candidates are nonempty");
        current = values.iter().find(|x| x.0 == u).unwrap().1;
        set = insert_sorted(&set, u);
    }
    Ok((set, current))
}

/// Lazy (CELF) greedy. For a monotone submodular `value` it returns the
/// same set as [`greedy_naive`]: stale gains are upper bounds, and every
/// candidate whose bound could still reach the tie window is refreshed
/// before a choice is made.
pub fn greedy_lazy<F>(n: usize, k: usize, value: F) -> Result<(Vec<usize>, f64)>
where
    F: Fn(&[usize]) -> Result<f64> + Sync,
{
    let mut set: Vec<usize> = Vec::new();
    let mut current = value(&set)?;
    let mut bound = vec![f64::INFINITY; n];
    for round in 0..k.min(n) {
        let mut fresh: Vec<(usize, f64)> = Vec::new();
        let mut is_fresh = vec![false; n];
        if round == 0 {
            let values: Vec<f64> = (0..n).into_par_iter().map(|u| value(&[u])).collect::<Result<_>>()?;
            for (u, v) in values.into_iter().enumerate() {
                bound[u] = v - current;
                is_fresh[u] = true;
                fresh.push((u, bound[u]));
            }
        }
        loop {
            let best_fresh = fresh.iter().map(|g| g.1).fold(f64::NEG_INFINITY, f64::max);
            let stale = (0..n)
                .filter(|&u| !is_fresh[u] && set.binary_search(&u).is_err())
                .filter(|&u| bound[u] >= best_fresh - TIE_TOLERANCE)
                .max_by(|&a, &b| bound[a].total_cmp(&bound[b]).then(b.cmp(&a)));
            match stale {
                Some(u) => {
                    bound[u] = value(&insert_sorted(&set, u))? - current;
                    is_fresh[u] = true;
                    fresh.push((u, bound[u]));
                }
                None => break,
            }
        }
        let u = pick(&fresh).expect("candidates are nonempty");
        set = insert_sorted(&set, u);
        current = value(&set)?;
    }
    Ok((set, current))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_break_to_lowest_id() {
        let (s, v) = greedy_naive(4, 2, |s| Ok(s.len() as f64)).unwrap();
        assert_eq!(s, vec![0, 1]);
        assert_eq!(v, 2.0);
        let (s, _) = greedy_lazy(4, 2, |s| Ok(s.len() as f64)).unwrap();
        assert_eq!(s, vec![0, 1]);
    }

    #[test]
    fn naive_keeps_adding_on_negative_gains() {
        let (s, v) = greedy_naive(3, 3, |s| Ok(-(s.len() as f64))).unwrap();
        assert_eq!(s, vec![0, 1, 2]);
        assert_eq!(v, -3.0);
    }

    #[test]
    fn coverage_function_agrees() {
        // weighted coverage: submodular
        let sets: [&[usize]; 5] = [&[0, 1, 2], &[2, 3], &[3, 4, 5], &[0, 5], &[1]];
        let weight = [1.0, 2.0, 1.5, 0.5, 3.0, 1.0];
        let value = |s: &[usize]| {
            let mut covered = [false; 6];
            for &i in s {
                for &e in sets[i] {
                    covered[e] = true;
                }
            }
            Ok((0..6).filter(|&e| covered[e]).map(|e| weight[e]).sum())
        };
        for k in 1..=5 {
            assert_eq!(greedy_naive(5, k, value).unwrap(), greedy_lazy(5, k, value).unwrap());
        }
    }
}
