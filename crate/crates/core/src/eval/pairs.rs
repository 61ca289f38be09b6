use std::collections::HashSet;
use std::io::Write;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{diff_snapshots, GraphSnapshot};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairMode {
    /// Linked pairs are edges of the target snapshot; non-linked pairs are
    /// its non-edges.
    #[default]
    All,
    /// Linked pairs are edges added since the previous snapshot; non-linked
    /// pairs are deleted edges, topped up with never-linked pairs.
    New,
}

impl std::str::FromStr for PairMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(PairMode::All),
            "new" => Ok(PairMode::New),
            other => Err(Error::contract(format!("unknown pair mode `{other}` (expected all or new)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub u: usize,
    pub v: usize,
    pub linked: bool,
}

/// Where the non-linked pairs came from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegativeComposition {
    pub deleted: usize,
    pub never_linked: usize,
}

/// Balanced, distinct test pairs. Linked pairs come first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestPairSet {
    pub pairs: Vec<LabeledPair>,
    pub mode: PairMode,
    pub seed: u64,
    pub negatives: NegativeComposition,
}

impl TestPairSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.pairs.iter().map(|p| p.linked).collect()
    }

    pub fn linked_count(&self) -> usize {
        self.pairs.iter().filter(|p| p.linked).count()
    }

    /// One `u v label` line per pair, label 1 for linked.
    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for p in &self.pairs {
            writeln!(out, "{} {} {}", p.u, p.v, u8::from(p.linked))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PairSampling<'a> {
    pub count_per_class: usize,
    pub mode: PairMode,
    pub seed: u64,
    /// Pairs linked here are never drawn as non-linked (e.g. the aggregate
    /// of the training snapshots).
    pub exclude: Option<&'a GraphSnapshot>,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Uniform distinct pairs `u < v` not rejected by `forbidden`.
///
/// Uses rejection sampling while the pool is large relative to `count`,
/// otherwise enumerates it.
fn sample_unlinked(
    n: usize,
    count: usize,
    available: usize,
    forbidden: impl Fn(usize, usize) -> bool,
    taken: &HashSet<(usize, usize)>,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, usize)> {
    if count == 0 {
        return Vec::new();
    }
    if available <= 2 * count {
        let mut pool = Vec::with_capacity(available);
        for u in 0..n {
            for v in u + 1..n {
                if !forbidden(u, v) && !taken.contains(&(u, v)) {
                    pool.push((u, v));
                }
            }
        }
        let take = count.min(pool.len());
        return index::sample(rng, pool.len(), take).into_iter().map(|i| pool[i]).collect();
    }
    let mut chosen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let p = key(u, v);
        if forbidden(p.0, p.1) || taken.contains(&p) || !chosen.insert(p) {
            continue;
        }
        out.push(p);
    }
    out
}

fn clamp(requested: usize, linked: usize, unlinked: usize) -> Result<usize> {
    if linked == 0 {
        return Err(Error::EmptyClass("linked"));
    }
    if unlinked == 0 {
        return Err(Error::EmptyClass("non-linked"));
    }
    let count = requested.min(linked).min(unlinked);
    if count < requested {
        log::warn!(
            "requested {requested} pairs per class; clamped to {count} ({linked} linked, {unlinked} non-linked available)"
        );
    }
    Ok(count)
}

/// Draws balanced linked/non-linked test pairs for `next`.
///
/// `prev` is required in [`PairMode::New`], where linked pairs are edges
/// added between `prev` and `next`.
pub fn sample_test_pairs(
    next: &GraphSnapshot,
    prev: Option<&GraphSnapshot>,
    opts: &PairSampling<'_>,
) -> Result<TestPairSet> {
    let n = next.n();
    for other in prev.iter().chain(opts.exclude.iter()) {
        if other.n() != n {
            return Err(Error::dimension(format!("snapshot sizes differ: {} vs {n}", other.n())));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let all_pairs = n * n.saturating_sub(1) / 2;
    let excluded = |u: usize, v: usize| opts.exclude.is_some_and(|h| h.has_edge(u, v));
    let excluded_only = |g: &GraphSnapshot| -> usize {
        // edges of the exclusion graph outside g
        opts.exclude.map_or(0, |h| h.edges().filter(|&(u, v, _)| !g.has_edge(u, v)).count())
    };

    let (linked_pool, deleted_pool, forbidden_pairs) = match opts.mode {
        PairMode::All => {
            let linked: Vec<(usize, usize)> = next.edges().map(|(u, v, _)| (u, v)).collect();
            let forbidden = next.m() + excluded_only(next);
            (linked, Vec::new(), forbidden)
        }
        PairMode::New => {
            let prev = prev.ok_or_else(|| Error::contract("new-links mode needs the previous snapshot"))?;
            let delta = diff_snapshots(prev, next)?;
            let added: Vec<(usize, usize)> = delta.added_edges.iter().map(|&(u, v, _)| key(u, v)).collect();
            let deleted: Vec<(usize, usize)> = delta.removed_edges.iter().map(|&(u, v, _)| key(u, v)).collect();
            let union = next.m() + deleted.len();
            let extra = opts
                .exclude
                .map_or(0, |h| h.edges().filter(|&(u, v, _)| !next.has_edge(u, v) && !prev.has_edge(u, v)).count());
            (added, deleted, union + extra)
        }
    };
    let never_available = all_pairs - forbidden_pairs;
    let count = clamp(opts.count_per_class, linked_pool.len(), deleted_pool.len() + never_available)?;

    let linked: Vec<(usize, usize)> =
        index::sample(&mut rng, linked_pool.len(), count).into_iter().map(|i| linked_pool[i]).collect();
    let deleted: Vec<(usize, usize)> = {
        let take = count.min(deleted_pool.len());
        index::sample(&mut rng, deleted_pool.len(), take).into_iter().map(|i| deleted_pool[i]).collect()
    };
    let taken: HashSet<(usize, usize)> = deleted.iter().copied().collect();
    let never = match opts.mode {
        PairMode::All => {
            let forbidden = |u: usize, v: usize| next.has_edge(u, v) || excluded(u, v);
            sample_unlinked(n, count, never_available, forbidden, &taken, &mut rng)
        }
        PairMode::New => {
            let prev = prev.unwrap();
            let forbidden = |u: usize, v: usize| next.has_edge(u, v) || prev.has_edge(u, v) || excluded(u, v);
            sample_unlinked(n, count - deleted.len(), never_available, forbidden, &taken, &mut rng)
        }
    };

    let negatives = NegativeComposition {
        deleted: deleted.len(),
        never_linked: never.len(),
    };
    let mut pairs = Vec::with_capacity(2 * count);
    pairs.extend(linked.into_iter().map(|(u, v)| LabeledPair { u, v, linked: true }));
    pairs.extend(deleted.into_iter().chain(never).map(|(u, v)| LabeledPair { u, v, linked: false }));
    Ok(TestPairSet {
        pairs,
        mode: opts.mode,
        seed: opts.seed,
        negatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(count: usize, mode: PairMode, seed: u64) -> PairSampling<'static> {
        PairSampling {
            count_per_class: count,
            mode,
            seed,
            exclude: None,
        }
    }

    fn ring(n: usize) -> GraphSnapshot {
        GraphSnapshot::from_edges(n, (0..n).map(|u| (u, (u + 1) % n, 1.0))).unwrap()
    }

    #[test]
    fn balanced_distinct_and_deterministic() {
        let g = ring(10);
        let a = sample_test_pairs(&g, None, &opts(5, PairMode::All, 3)).unwrap();
        let b = sample_test_pairs(&g, None, &opts(5, PairMode::All, 3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.linked_count(), 5);
        assert_eq!(a.len(), 10);
        let distinct: HashSet<_> = a.pairs.iter().map(|p| key(p.u, p.v)).collect();
        assert_eq!(distinct.len(), 10);
        for p in &a.pairs {
            assert_ne!(p.u, p.v);
            assert_eq!(g.has_edge(p.u, p.v), p.linked);
        }
    }

    #[test]
    fn complete_graph_has_no_negatives() {
        let mut edges = Vec::new();
        for u in 0..5 {
            for v in u + 1..5 {
                edges.push((u, v, 1.0));
            }
        }
        let g = GraphSnapshot::from_edges(5, edges).unwrap();
        let err = sample_test_pairs(&g, None, &opts(3, PairMode::All, 0)).unwrap_err();
        assert!(err.to_string().contains("non-linked"));
    }

    #[test]
    fn clamps_to_available() {
        let g = ring(6);
        let s = sample_test_pairs(&g, None, &opts(100, PairMode::All, 1)).unwrap();
        assert_eq!(s.linked_count(), 6);
        assert_eq!(s.len(), 12);
    }

    #[test]
    fn new_links_uses_delta() {
        let prev = GraphSnapshot::from_edges(8, [(0, 1, 1.0), (2, 3, 1.0), (4, 5, 1.0)]).unwrap();
        let next = GraphSnapshot::from_edges(8, [(0, 1, 1.0), (1, 2, 1.0), (6, 7, 1.0)]).unwrap();
        let s = sample_test_pairs(&next, Some(&prev), &opts(2, PairMode::New, 4)).unwrap();
        let linked: HashSet<_> = s.pairs.iter().filter(|p| p.linked).map(|p| key(p.u, p.v)).collect();
        assert_eq!(linked, HashSet::from([(1, 2), (6, 7)]));
        assert_eq!(s.negatives, NegativeComposition { deleted: 2, never_linked: 0 });
        let more = sample_test_pairs(&next, Some(&prev), &opts(1, PairMode::New, 4)).unwrap();
        assert_eq!(more.negatives.deleted, 1);
        assert!(sample_test_pairs(&next, None, &opts(2, PairMode::New, 4)).is_err());
    }

    #[test]
    fn exclusion_skips_history() {
        let next = GraphSnapshot::from_edges(5, [(0, 1, 1.0)]).unwrap();
        let hist = GraphSnapshot::from_edges(5, [(0, 2, 1.0), (0, 3, 1.0), (0, 4, 1.0)]).unwrap();
        let o = PairSampling { exclude: Some(&hist), ..opts(50, PairMode::All, 2) };
        let s = sample_test_pairs(&next, None, &o).unwrap();
        for p in s.pairs.iter().filter(|p| !p.linked) {
            assert!(!hist.has_edge(p.u, p.v));
        }
    }

    #[test]
    fn export_format() {
        let g = ring(4);
        let s = sample_test_pairs(&g, None, &opts(1, PairMode::All, 0)).unwrap();
        let mut buf = Vec::new();
        s.write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().next().unwrap().ends_with(" 1"));
    }
}
