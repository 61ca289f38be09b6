// Hold out the last snapshot, fit on the rest and score sampled pairs
// against the latent model and two baselines.

use temporal_latent::eval::{
    adamic_adar, auc_pr, auc_roc, previous_graph_baseline, sample_test_pairs, score_pair, score_pairs, PairMode,
    PairSampling,
};
use temporal_latent::graph::{planted_partition_generate, PlantedPartitionParams};
use temporal_latent::{fit, Algorithm, SolverConfig};

pub fn run_example() -> temporal_latent::Result<()> {
    let g = planted_partition_generate(&PlantedPartitionParams {
        n: 100,
        blocks: 2,
        p_in: 0.3,
        p_out: 0.02,
        drift_fraction: 0.05,
        snapshots: 3,
        seed: 3,
    })?
    .graph;
    let train = g.prefix(2)?;
    let last = train.snapshot(1);
    let agg = train.aggregate();

    for mode in [PairMode::All, PairMode::New] {
        let pairs = sample_test_pairs(
            g.snapshot(2),
            Some(last),
            &PairSampling { count_per_class: 2000, mode, seed: 3, exclude: None },
        )?;
        let labels = pairs.labels();
        let traj = fit(&train, Algorithm::Local, &SolverConfig { seed: 3, ..SolverConfig::default() })?;
        let z = traj.last();
        let latent = score_pairs(&pairs, |u, v| score_pair(z, u, v).unwrap());
        let aa = score_pairs(&pairs, |u, v| adamic_adar(&agg, u, v));
        let gpre = score_pairs(&pairs, |u, v| previous_graph_baseline(last, u, v, false));
        println!("{mode:?} links, {} pairs:", pairs.len());
        for (name, s) in [("latent", &latent), ("adamic-adar", &aa), ("previous graph", &gpre)] {
            println!("  {name:<15} AUC-ROC {:.4}  AUC-PR {:.4}", auc_roc(s, &labels)?, auc_pr(s, &labels)?);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
