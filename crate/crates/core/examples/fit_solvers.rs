// Fit the same stream with all three solvers and compare objective,
// iterations and work.

use temporal_latent::graph::{planted_partition_generate, PlantedPartitionParams};
use temporal_latent::{fit, Algorithm, SolverConfig};

pub fn run_example() -> temporal_latent::Result<()> {
    let g = planted_partition_generate(&PlantedPartitionParams {
        n: 150,
        blocks: 3,
        p_in: 0.3,
        p_out: 0.02,
        drift_fraction: 0.05,
        snapshots: 4,
        seed: 2,
    })?
    .graph;
    for algo in [Algorithm::Global, Algorithm::Local, Algorithm::Incremental] {
        let cfg = SolverConfig { k: 10, seed: 2, ..SolverConfig::for_algorithm(algo) };
        let traj = fit(&g, algo, &cfg)?;
        traj.validate()?;
        let work = traj.total_work();
        println!(
            "{algo:?}: lambda={} objective {:.3} -> {:.3}, iterations {:?}, row updates {}",
            cfg.lambda,
            traj.objective_trace[0],
            traj.objective_trace.last().unwrap(),
            traj.iterations_used,
            work.row_updates,
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
