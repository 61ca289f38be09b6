// Diff consecutive snapshots, seed the changed rows and watch the affected
// set shrink as the incremental solver converges.

use temporal_latent::graph::{diff_snapshots, planted_partition_generate, PlantedPartitionParams};
use temporal_latent::solver::{fit_incremental, fit_local, init_updated_rows, refresh_affected_set, AffectedSet};
use temporal_latent::{Algorithm, SolverConfig};

pub fn run_example() -> temporal_latent::Result<()> {
    let g = planted_partition_generate(&PlantedPartitionParams {
        n: 300,
        blocks: 3,
        p_in: 0.1,
        p_out: 0.005,
        drift_fraction: 0.02,
        snapshots: 3,
        seed: 4,
    })?
    .graph;
    let cfg = SolverConfig { k: 10, seed: 4, ..SolverConfig::for_algorithm(Algorithm::Incremental) };
    let (zeta, delta) = cfg.thresholds(g.n());
    println!("zeta={zeta:.5} delta={delta:.5}");

    let first = fit_local(&g.prefix(1)?, &cfg)?;
    let diff = diff_snapshots(g.snapshot(0), g.snapshot(1))?;
    println!("{} edge changes touching {} nodes", diff.edge_change_count(), diff.changed_nodes.len());
    let seeded = init_updated_rows(g.snapshot(1), first.last(), &diff.changed_nodes)?;
    let set = refresh_affected_set(
        &seeded,
        first.last(),
        &AffectedSet::new(diff.changed_nodes.clone()),
        g.snapshot(1),
        delta,
        zeta,
    );
    println!("after seeding, {} nodes still affected", set.len());

    let traj = fit_incremental(&g, &cfg)?;
    for (tau, sizes) in traj.affected.iter().enumerate().skip(1) {
        let trail: Vec<usize> = sizes.iter().map(|s| s.affected).collect();
        println!("snapshot {}: affected set per iteration {trail:?}", tau + 1);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
