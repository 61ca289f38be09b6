// Sweep the smoothing weight of the local solver and report the
// one-step-ahead prediction error.

use temporal_latent::eval::prediction_error;
use temporal_latent::graph::{planted_partition_generate, PlantedPartitionParams};
use temporal_latent::solver::fit_local;
use temporal_latent::SolverConfig;

pub fn run_example() -> temporal_latent::Result<()> {
    let g = planted_partition_generate(&PlantedPartitionParams {
        n: 100,
        blocks: 5,
        p_in: 0.4,
        p_out: 0.02,
        drift_fraction: 0.1,
        snapshots: 6,
        seed: 5,
    })?
    .graph;
    for lambda in [0.0, 1e-2, 1.0, 10.0] {
        let traj = fit_local(&g, &SolverConfig { k: 10, lambda, seed: 5, ..SolverConfig::default() })?;
        println!("lambda={lambda:<6} prediction error {:.4}", prediction_error(&g, &traj)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
