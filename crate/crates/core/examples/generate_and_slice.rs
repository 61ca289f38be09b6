// Generate a drifting planted partition, flatten it to timestamped
// interactions and slice it back into snapshots.

use temporal_latent::graph::{planted_partition_generate, slice_snapshots, Boundaries, PlantedPartitionParams};

pub fn run_example() -> temporal_latent::Result<()> {
    let pp = planted_partition_generate(&PlantedPartitionParams {
        n: 200,
        blocks: 4,
        p_in: 0.2,
        p_out: 0.01,
        drift_fraction: 0.05,
        snapshots: 4,
        seed: 1,
    })?;
    let edges = pp.to_temporal_edges();
    let (g, stats) = slice_snapshots(&edges, &Boundaries::Equal(4), true)?;
    for (tau, s) in g.snapshots().iter().enumerate() {
        assert_eq!(s, pp.graph.snapshot(tau));
        println!("snapshot {}: n={} m={}", tau + 1, s.n(), s.m());
    }
    println!("{} interactions, {} out of range", edges.records.len(), stats.out_of_range);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
