//! Small counting and subset-enumeration helpers used by the exhaustive
//! oracles.

/// `C(n, k)` as a float, so that huge counts compare against caps without
/// overflowing.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Number of subsets of an `n`-set with at most `k` elements.
pub fn subsets_up_to(n: usize, k: usize) -> f64 {
    (0..=k.min(n)).map(|j| binomial(n, j)).sum()
}

/// Lexicographic iterator over the `k`-subsets of `0..n`.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let current = if k <= n { Some((0..k).collect()) } else { None };
        Self { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// All subsets of `0..n` with between `lo` and `hi` elements, by size then
/// lexicographically.
pub fn subsets_between(n: usize, lo: usize, hi: usize) -> impl Iterator<Item = Vec<usize>> {
    (lo..=hi.min(n)).flat_map(move |k| Combinations::new(n, k))
}
