mod common;

use common::*;
use ltoim::diffusion::{diffuse_lt, sample_thresholds, Model};
use ltoim::graph::build_graph;
use ltoim::rng::SeedStream;
use ltoim::spread::{
    exact_marginals, exact_opt, exact_spread, exact_spread_lt, greedy_im, greedy_lazy, greedy_naive, mc_spread, SpreadEvaluator,
    GREEDY_ALPHA, LIVE_EDGE_CAP,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_spread_matches_unpruned_enumeration((g, w) in graph_strategy(1, 5, false), mask in 1u32..32) {
        let seeds: Vec<usize> = (0..g.n()).filter(|&i| mask & (1 << i) != 0).collect();
        prop_assume!(!seeds.is_empty());
        let lib = exact_spread_lt(&g, &w, &seeds).unwrap();
        let reference = naive_spread(&g, &w, &seeds);
        prop_assert!((lib - reference).abs() < 1e-9, "{} vs {}", lib, reference);
        let marg = exact_marginals(Model::Lt, &g, &w, &seeds, LIVE_EDGE_CAP).unwrap();
        for (a, b) in marg.iter().zip(naive_marginals(&g, &w, &seeds)) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn spread_is_bounded_monotone_and_submodular((g, w) in graph_strategy(2, 5, false), a in 0usize..5, b in 0usize..5, x in 0usize..5) {
        let n = g.n();
        let (a, b, x) = (a % n, b % n, x % n);
        let r = |s: &[usize]| exact_spread_lt(&g, &w, s).unwrap();
        let small = vec![a];
        let mut large = vec![a, b];
        large.sort_unstable();
        large.dedup();
        prop_assert!(r(&small) >= 1.0 - 1e-12 && r(&small) <= n as f64 + 1e-12);
        prop_assert!(r(&large) >= r(&small) - 1e-12);
        let with = |s: &[usize]| { let mut t = s.to_vec(); t.push(x); t.sort_unstable(); t.dedup(); t };
        let gain_small = r(&with(&small)) - r(&small);
        let gain_large = r(&with(&large)) - r(&large);
        prop_assert!(gain_small >= gain_large - 1e-9);
    }

    #[test]
    fn spread_is_lipschitz_in_weights((g, w) in graph_strategy(2, 5, false), seed in any::<u64>()) {
        // |r(S,w) − r(S,w')| ≤ n · Σ_e |w(e) − w'(e)|
        let mut rng = SeedStream::new(seed).rng();
        let w2 = random_weights(&g, &mut rng);
        let diff: f64 = w.as_slice().iter().zip(w2.as_slice()).map(|(a, b)| (a - b).abs()).sum();
        let d = (exact_spread_lt(&g, &w, &[0]).unwrap() - exact_spread_lt(&g, &w2, &[0]).unwrap()).abs();
        prop_assert!(d <= g.n() as f64 * diff + 1e-9);
    }

    #[test]
    fn lazy_greedy_equals_naive_greedy((g, w) in graph_strategy(2, 5, false), k in 1usize..4) {
        let f = |s: &[usize]| exact_spread_lt(&g, &w, s);
        let naive = greedy_naive(g.n(), k, f).unwrap();
        let lazy = greedy_lazy(g.n(), k, f).unwrap();
        prop_assert_eq!(naive.0, lazy.0);
        prop_assert!((naive.1 - lazy.1).abs() < 1e-12);
    }

    #[test]
    fn greedy_reaches_its_guarantee((g, w) in graph_strategy(2, 5, false), k in 1usize..4) {
        let opt = exact_opt(&g, &w, k).unwrap();
        let greedy = greedy_im(&g, &w, k, &SpreadEvaluator::exact(Model::Lt)).unwrap();
        prop_assert!(greedy.value >= GREEDY_ALPHA * opt.value - 1e-9);
        prop_assert!(greedy.value <= opt.value + 1e-9);
    }
}

#[test]
fn cascade_frequencies_match_exact_marginals() {
    let (g, w) = build_graph(&[(0, 1, 0.4), (0, 2, 0.3), (1, 2, 0.5), (2, 3, 0.6), (1, 3, 0.2)]).unwrap();
    let exact = exact_marginals(Model::Lt, &g, &w, &[0], LIVE_EDGE_CAP).unwrap();
    let mut rng = SeedStream::new(21).rng();
    let runs = 200_000;
    let mut hits = vec![0usize; g.n()];
    for _ in 0..runs {
        let t = diffuse_lt(&g, &w, &[0], &sample_thresholds(&g, &mut rng));
        for (v, h) in hits.iter_mut().enumerate() {
            *h += t.is_active(v) as usize;
        }
    }
    for v in 0..g.n() {
        let p = exact[v];
        let f = hits[v] as f64 / runs as f64;
        let sigma = (p * (1.0 - p) / runs as f64).sqrt();
        assert!((f - p).abs() <= 3.0 * sigma + 1e-12, "node {v}: {f} vs {p}");
    }
}

#[test]
fn ic_exact_spread_by_hand() {
    // two parallel paths into node 3: P(3) = 1 − (1 − 0.5·0.5)(1 − 0.4·0.5)
    let (g, w) = build_graph(&[(0, 1, 0.5), (1, 3, 0.5), (0, 2, 0.4), (2, 3, 0.5)]).unwrap();
    let r = exact_spread(Model::Ic, &g, &w, &[0], LIVE_EDGE_CAP).unwrap();
    let p3 = 1.0 - (1.0 - 0.25) * (1.0 - 0.2);
    assert!((r - (1.0 + 0.5 + 0.4 + p3)).abs() < 1e-12);
    let mc = mc_spread(&g, &w, &[0], 10, &mut SeedStream::new(1).rng());
    assert_eq!(mc.sims, 10);
}
