// The `gen -> snapshot -> fit -> eval` pipeline of the `tlatent` binary,
// driven through the library entry points in a temporary directory.

use std::path::PathBuf;

use temporal_latent::eval::PairMode;
use temporal_latent::graph::Boundaries;
use temporal_latent::harness::{
    cmd_eval, cmd_fit, cmd_gen, cmd_snapshot, Baseline, EvalArgs, FitArgs, FitOverrides, GenArgs, SnapshotArgs,
};
use temporal_latent::Algorithm;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("tlatent-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let edges = dir.join("edges.txt");
    cmd_gen(&GenArgs {
        n: 100,
        blocks: 2,
        p_in: 0.3,
        p_out: 0.02,
        drift: 0.05,
        snapshots: 3,
        seed: 6,
        out: edges.clone(),
        memberships_out: None,
    })?;
    let snaps = dir.join("snapshots");
    cmd_snapshot(&SnapshotArgs {
        input: edges,
        out_dir: snaps.clone(),
        boundaries: Boundaries::Equal(3),
        binarize: true,
        dense_ids: false,
    })?;
    let snap = |i: usize| -> PathBuf { snaps.join(format!("snapshot_{i:03}.txt")) };
    let fitted = dir.join("fit");
    cmd_fit(&FitArgs {
        snapshots: vec![snap(1), snap(2)],
        out_dir: fitted.clone(),
        algo: Algorithm::Local,
        overrides: FitOverrides { seed: Some(6), ..FitOverrides::default() },
    })?;
    let (_, report) = cmd_eval(&EvalArgs {
        latent: vec![fitted.join("latent_002.txt")],
        test: snap(3),
        train: vec![snap(1), snap(2)],
        mode: PairMode::All,
        pairs: 1000,
        seed: 6,
        baseline: Baseline::Aa,
        exclude_history: false,
        out: dir.join("report.json"),
        pairs_out: None,
        no_timings: true,
    })?;
    println!("AUC-ROC {:.4}  AUC-PR {:.4}", report.auc_roc, report.auc_pr);
    if let Some(b) = &report.baseline {
        println!("baseline {b:?}");
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
