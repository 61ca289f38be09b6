//! Planted-partition dynamic graphs with community drift.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::dynamic::DynamicGraph;
use crate::graph::edges::{TemporalEdge, TemporalEdgeList};
use crate::graph::snapshot::GraphSnapshot;

#[derive(Clone, Debug, PartialEq)]
pub struct PlantedPartitionParams {
    pub n: usize,
    pub blocks: usize,
    pub p_in: f64,
    pub p_out: f64,
    /// Fraction of nodes reassigned to a random block between snapshots.
    pub drift_fraction: f64,
    pub snapshots: usize,
    pub seed: u64,
}

/// Generated graph together with the block of every node at every step.
#[derive(Clone, Debug)]
pub struct PlantedPartition {
    pub graph: DynamicGraph,
    pub memberships: Vec<Vec<usize>>,
}

impl PlantedPartition {
    /// Flattens the snapshots into `u v t` records with `t = tau + 0.5`, so
    /// that slicing with cut points `0, 1, ..., T` or into `T` equal
    /// intervals recovers the snapshots.
    pub fn to_temporal_edges(&self) -> TemporalEdgeList {
        let records = self
            .graph
            .snapshots()
            .iter()
            .enumerate()
            .flat_map(|(tau, s)| {
                s.edges().map(move |(u, v, w)| TemporalEdge {
                    u,
                    v,
                    t: tau as f64 + 0.5,
                    w,
                })
            })
            .collect();
        TemporalEdgeList::from_records(self.graph.n(), records).expect("generator emits valid records")
    }
}

impl PlantedPartitionParams {
    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::contract("n must be at least 2"));
        }
        if self.blocks == 0 || self.blocks > self.n {
            return Err(Error::contract(format!(
                "blocks must be in [1, n], got {}",
                self.blocks
            )));
        }
        if !(0.0 <= self.p_out && self.p_out < self.p_in && self.p_in <= 1.0) {
            return Err(Error::contract("require 0 <= p_out < p_in <= 1"));
        }
        if !(0.0..=1.0).contains(&self.drift_fraction) {
            return Err(Error::contract("drift_fraction must lie in [0, 1]"));
        }
        if self.snapshots == 0 {
            return Err(Error::contract("at least one snapshot is required"));
        }
        Ok(())
    }
}

/// Gap until the next success in a Bernoulli(p) sequence, as used by the
/// Batagelj–Brandes skip sampler.
#[inline]
fn skip<R: Rng>(rng: &mut R, log_q: f64) -> usize {
    if log_q == f64::NEG_INFINITY {
        return 0;
    }
    let r: f64 = rng.gen::<f64>();
    ((1.0 - r).ln() / log_q).floor() as usize
}

/// Calls `emit(i, j)` for each `i < j < len` independently with probability `p`.
fn sample_within<R: Rng>(rng: &mut R, len: usize, p: f64, mut emit: impl FnMut(usize, usize)) {
    if p <= 0.0 || len < 2 {
        return;
    }
    let log_q = (1.0 - p).ln();
    let (mut v, mut w) = (1usize, 0usize);
    let mut first = true;
    loop {
        let gap = skip(rng, log_q);
        w = if first { gap } else { w + 1 + gap };
        first = false;
        while w >= v && v < len {
            w -= v;
            v += 1;
        }
        if v >= len {
            break;
        }
        emit(w, v);
    }
}

/// Calls `emit(i)` for each `i < len` independently with probability `p`.
fn sample_indices<R: Rng>(rng: &mut R, len: usize, p: f64, mut emit: impl FnMut(usize)) {
    if p <= 0.0 {
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut i = skip(rng, log_q);
    while i < len {
        emit(i);
        i += 1 + skip(rng, log_q);
    }
}

fn members_of(block_of: &[usize], blocks: usize) -> Vec<Vec<usize>> {
    let mut members = vec![Vec::new(); blocks];
    for (u, &b) in block_of.iter().enumerate() {
        members[b].push(u);
    }
    members
}

/// Generates a seeded planted-partition sequence.
///
/// The first snapshot assigns node `u` to block `u * blocks / n` and samples
/// every pair independently (`p_in` inside a block, `p_out` across). Each
/// later snapshot moves `round(drift_fraction * n)` uniformly chosen nodes
/// to uniformly random blocks and resamples all of their incident pairs;
/// the remaining edges carry over.
pub fn planted_partition_generate(params: &PlantedPartitionParams) -> Result<PlantedPartition> {
    params.validate()?;
    let PlantedPartitionParams {
        n,
        blocks,
        p_in,
        p_out,
        drift_fraction,
        snapshots,
        seed,
    } = *params;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut block_of: Vec<usize> = (0..n).map(|u| u * blocks / n).collect();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    {
        let members = members_of(&block_of, blocks);
        for a in 0..blocks {
            let ma = &members[a];
            sample_within(&mut rng, ma.len(), p_in, |i, j| edges.push((ma[i], ma[j])));
            for mb in &members[a + 1..] {
                sample_indices(&mut rng, ma.len() * mb.len(), p_out, |idx| {
                    edges.push((ma[idx / mb.len()], mb[idx % mb.len()]));
                });
            }
        }
    }

    let build = |edges: &[(usize, usize)]| {
        GraphSnapshot::from_edges(n, edges.iter().map(|&(u, v)| (u, v, 1.0)))
    };
    let mut graphs = vec![build(&edges)?];
    let mut memberships = vec![block_of.clone()];

    let movers = (drift_fraction * n as f64).round() as usize;
    let mut moved = vec![false; n];
    for _ in 1..snapshots {
        let chosen = sample(&mut rng, n, movers).into_vec();
        let mut chosen_sorted = chosen.clone();
        chosen_sorted.sort_unstable();
        for &u in &chosen_sorted {
            moved[u] = true;
            block_of[u] = rng.gen_range(0..blocks);
        }
        edges.retain(|&(u, v)| !moved[u] && !moved[v]);

        let members = members_of(&block_of, blocks);
        for &u in &chosen_sorted {
            for (b, mb) in members.iter().enumerate() {
                let p = if b == block_of[u] { p_in } else { p_out };
                sample_indices(&mut rng, mb.len(), p, |i| {
                    let v = mb[i];
                    // a pair of two movers is drawn only from its smaller endpoint
                    if v != u && (!moved[v] || v > u) {
                        edges.push((u.min(v), u.max(v)));
                    }
                });
            }
        }
        for &u in &chosen_sorted {
            moved[u] = false;
        }
        graphs.push(build(&edges)?);
        memberships.push(block_of.clone());
    }

    Ok(PlantedPartition {
        graph: DynamicGraph::new(graphs)?,
        memberships,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, blocks: usize, p_in: f64, p_out: f64, drift: f64, t: usize, seed: u64) -> PlantedPartitionParams {
        PlantedPartitionParams {
            n,
            blocks,
            p_in,
            p_out,
            drift_fraction: drift,
            snapshots: t,
            seed,
        }
    }

    #[test]
    fn degenerate_probabilities_give_cliques() {
        let pp = planted_partition_generate(&params(4, 2, 1.0, 0.0, 0.0, 2, 3)).unwrap();
        for s in pp.graph.snapshots() {
            let e: Vec<_> = s.edges().map(|(u, v, _)| (u, v)).collect();
            assert_eq!(e, vec![(0, 1), (2, 3)]);
        }
    }

    #[test]
    fn same_seed_same_graph() {
        let p = params(60, 3, 0.4, 0.05, 0.2, 4, 11);
        let a = planted_partition_generate(&p).unwrap();
        let b = planted_partition_generate(&p).unwrap();
        assert_eq!(a.graph, b.graph);
        let c = planted_partition_generate(&PlantedPartitionParams { seed: 12, ..p }).unwrap();
        assert_ne!(a.graph, c.graph);
    }

    #[test]
    fn intra_block_count_within_three_sigma() {
        let pp = planted_partition_generate(&params(100, 2, 0.3, 0.02, 0.0, 3, 7)).unwrap();
        let s = pp.graph.snapshot(0);
        let block = &pp.memberships[0];
        let intra = s.edges().filter(|&(u, v, _)| block[u] == block[v]).count() as f64;
        let pairs: f64 = 2.0 * (50.0 * 49.0 / 2.0);
        let mean = pairs * 0.3;
        let sigma = (pairs * 0.3 * 0.7).sqrt();
        assert_eq!(mean, 735.0);
        assert!((intra - mean).abs() <= 3.0 * sigma, "intra {intra}");
        let inter = s.edges().filter(|&(u, v, _)| block[u] != block[v]).count() as f64;
        let mean_out = 2500.0 * 0.02;
        let sigma_out = (2500.0 * 0.02 * 0.98f64).sqrt();
        assert!((inter - mean_out).abs() <= 3.0 * sigma_out, "inter {inter}");
    }

    #[test]
    fn skip_sampler_is_unbiased_per_pair() {
        // every pair of a 6-set should be hit ~ p * trials times
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut counts = [[0usize; 6]; 6];
        let trials = 20_000;
        for _ in 0..trials {
            sample_within(&mut rng, 6, 0.25, |i, j| {
                assert!(i < j && j < 6);
                counts[i][j] += 1;
            });
        }
        let sigma = (trials as f64 * 0.25 * 0.75).sqrt();
        for i in 0..6 {
            for j in i + 1..6 {
                let dev = (counts[i][j] as f64 - trials as f64 * 0.25).abs();
                assert!(dev < 4.0 * sigma, "pair ({i},{j}) count {}", counts[i][j]);
            }
        }
    }

    #[test]
    fn drift_moves_expected_node_count() {
        let pp = planted_partition_generate(&params(200, 4, 0.3, 0.01, 0.1, 3, 1)).unwrap();
        for s in pp.graph.snapshots() {
            s.validate().unwrap();
        }
        // movers may land in their old block, so at most 20 memberships change
        let changed = (0..200)
            .filter(|&u| pp.memberships[0][u] != pp.memberships[1][u])
            .count();
        assert!(changed <= 20 && changed > 5, "changed {changed}");
    }

    #[test]
    fn rejects_bad_params() {
        assert!(planted_partition_generate(&params(4, 5, 0.5, 0.1, 0.0, 1, 0)).is_err());
        assert!(planted_partition_generate(&params(4, 2, 0.1, 0.5, 0.0, 1, 0)).is_err());
        assert!(planted_partition_generate(&params(4, 2, 0.5, 0.1, 1.5, 1, 0)).is_err());
    }

    #[test]
    fn temporal_edges_reslice_to_same_graph() {
        use crate::graph::dynamic::{slice_snapshots, Boundaries};
        let pp = planted_partition_generate(&params(30, 2, 0.5, 0.05, 0.2, 3, 2)).unwrap();
        let list = pp.to_temporal_edges();
        let (g, _) = slice_snapshots(&list, &Boundaries::Equal(3), true).unwrap();
        assert_eq!(g, pp.graph);
        let (g, _) = slice_snapshots(&list, &Boundaries::Cuts(vec![0.0, 1.0, 2.0, 3.0]), true).unwrap();
        assert_eq!(g, pp.graph);
    }
}
