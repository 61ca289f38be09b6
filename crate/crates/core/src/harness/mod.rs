//! Reproducible command runs: snapshot slicing, fitting, evaluation and
//! synthetic generation, each leaving a manifest behind.

mod commands;
mod manifest;

pub use commands::{
    cmd_eval, cmd_fit, cmd_gen, cmd_snapshot, config_path, exit_code, load_overrides, read_dynamic_graph,
    read_latent, read_snapshot, Baseline, EvalArgs, FitArgs, FitDiagnostics, FitOverrides, GenArgs, SnapshotArgs,
    CONFIG_ENV, DEFAULT_CONFIG_FILE,
};
pub use manifest::{file_digest, InputDigest, RunManifest};
