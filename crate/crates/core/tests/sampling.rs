use std::collections::HashMap;

use temporal_latent::eval::{sample_test_pairs, PairMode, PairSampling};
use temporal_latent::GraphSnapshot;

fn graph(n: usize, edges: &[(usize, usize)]) -> GraphSnapshot {
    GraphSnapshot::from_edges(n, edges.iter().map(|&(u, v)| (u, v, 1.0)).collect::<Vec<_>>()).unwrap()
}

/// Every candidate of each class appears with frequency `draws * count / available`.
#[test]
fn inclusion_frequencies_are_uniform() {
    let n = 10;
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|u| [(u, (u + 1) % n), (u, (u + 3) % n)]).collect();
    let g = graph(n, &edges);
    let m = g.m();
    let non_edges = n * (n - 1) / 2 - m;
    let count = 5;
    let draws = 10_000;

    let mut seen: HashMap<(usize, usize, bool), usize> = HashMap::new();
    for seed in 0..draws {
        let set = sample_test_pairs(
            &g,
            None,
            &PairSampling { count_per_class: count, mode: PairMode::All, seed, exclude: None },
        )
        .unwrap();
        for p in &set.pairs {
            *seen.entry((p.u.min(p.v), p.u.max(p.v), p.linked)).or_default() += 1;
        }
    }
    for (linked, available) in [(true, m), (false, non_edges)] {
        let p = count as f64 / available as f64;
        let mean = draws as f64 * p;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        let mut classes = 0;
        for u in 0..n {
            for v in u + 1..n {
                if g.has_edge(u, v) != linked {
                    continue;
                }
                classes += 1;
                let got = seen.get(&(u, v, linked)).copied().unwrap_or(0) as f64;
                assert!((got - mean).abs() <= 3.0 * sigma, "({u},{v}) linked={linked}: {got} vs {mean:.1} ± {sigma:.1}");
            }
        }
        assert_eq!(classes, available);
    }
    assert!(seen.keys().all(|&(u, v, linked)| g.has_edge(u, v) == linked));
}

#[test]
fn new_links_negatives_prefer_deleted_edges() {
    let prev = graph(8, &[(0, 1), (1, 2), (2, 3), (4, 5)]);
    let next = graph(8, &[(0, 1), (3, 4), (5, 6), (6, 7)]);
    let set = sample_test_pairs(
        &next,
        Some(&prev),
        &PairSampling { count_per_class: 3, mode: PairMode::New, seed: 1, exclude: None },
    )
    .unwrap();
    assert_eq!(set.linked_count(), 3);
    for p in set.pairs.iter().filter(|p| p.linked) {
        assert!(next.has_edge(p.u, p.v) && !prev.has_edge(p.u, p.v));
    }
    // three deleted edges exist, so no never-linked pair is needed
    assert_eq!((set.negatives.deleted, set.negatives.never_linked), (3, 0));
    for p in set.pairs.iter().filter(|p| !p.linked) {
        assert!(prev.has_edge(p.u, p.v) && !next.has_edge(p.u, p.v));
    }

    let set = sample_test_pairs(
        &next,
        Some(&graph(8, &[(0, 1), (2, 3)])),
        &PairSampling { count_per_class: 3, mode: PairMode::New, seed: 1, exclude: None },
    )
    .unwrap();
    assert_eq!((set.negatives.deleted, set.negatives.never_linked), (1, 2));
    for p in set.pairs.iter().filter(|p| !p.linked && !(p.u.min(p.v) == 2 && p.u.max(p.v) == 3)) {
        assert!(!next.has_edge(p.u, p.v));
    }
}

#[test]
fn same_seed_same_pairs() {
    let g = graph(10, &[(0, 1), (1, 2), (2, 3), (3, 4), (5, 6), (7, 8)]);
    let cfg = PairSampling { count_per_class: 5, mode: PairMode::All, seed: 42, exclude: None };
    assert_eq!(sample_test_pairs(&g, None, &cfg).unwrap(), sample_test_pairs(&g, None, &cfg).unwrap());
}
