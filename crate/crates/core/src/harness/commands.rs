use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{
    adamic_adar, auc_pr, auc_roc, prediction_error_spaces, previous_graph_baseline, sample_test_pairs, score_pair,
    score_pairs, BaselineReport, EvalReport, PairMode, PairSampling, PairSummary,
};
use crate::graph::{
    load_temporal_edges, planted_partition_generate, slice_snapshots, Boundaries, DynamicGraph, EdgeListFormat,
    GraphSnapshot, IdMode, PlantedPartitionParams,
};
use crate::harness::manifest::{write_json, RunManifest};
use crate::latent::{residual, AffectedStats, LatentSpace, Trajectory, WorkCounters};
use crate::solver::{fit, Algorithm, SolverConfig};

/// Environment variable naming a JSON file of fit defaults.
pub const CONFIG_ENV: &str = "TLATENT_CONFIG";
/// Default config file, looked up in the working directory.
pub const DEFAULT_CONFIG_FILE: &str = "tlatent.json";

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn io_at(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

fn echo<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).unwrap_or(serde_json::Value::Null)
}

/// Reads a snapshot file, attaching the path to parse errors.
pub fn read_snapshot(path: &Path) -> Result<(usize, GraphSnapshot)> {
    GraphSnapshot::read_edge_list(open(path)?).map_err(|e| match e {
        Error::Parse { line, msg } => Error::Parse {
            line,
            msg: format!("{}: {msg}", path.display()),
        },
        other => other,
    })
}

pub fn read_latent(path: &Path) -> Result<(usize, LatentSpace)> {
    LatentSpace::read(open(path)?).map_err(|e| match e {
        Error::Parse { line, msg } => Error::Parse {
            line,
            msg: format!("{}: {msg}", path.display()),
        },
        other => other,
    })
}

/// Loads snapshot files in the given order.
pub fn read_dynamic_graph(paths: &[PathBuf]) -> Result<DynamicGraph> {
    let snaps = paths.iter().map(|p| read_snapshot(p).map(|s| s.1)).collect::<Result<Vec<_>>>()?;
    DynamicGraph::new(snaps)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SnapshotArgs {
    pub input: PathBuf,
    pub out_dir: PathBuf,
    pub boundaries: Boundaries,
    pub binarize: bool,
    /// Treat ids as dense integers instead of remapping tokens.
    pub dense_ids: bool,
}

/// Slices an interaction file into `snapshot_XXX.txt` files (1-based).
pub fn cmd_snapshot(args: &SnapshotArgs) -> Result<RunManifest> {
    let mut manifest = RunManifest::new("snapshot", echo(args), None);
    manifest.add_input(&args.input)?;
    ensure_dir(&args.out_dir)?;
    let format = EdgeListFormat {
        ids: if args.dense_ids { IdMode::Dense } else { IdMode::Remap },
    };
    let edges = manifest.time("load", || load_temporal_edges(open(&args.input)?, format))?;
    if edges.rejected_self_loops > 0 {
        log::warn!("dropped {} self-loop interactions", edges.rejected_self_loops);
    }
    let (graph, _) = manifest.time("slice", || slice_snapshots(&edges, &args.boundaries, args.binarize))?;
    let write_start = std::time::Instant::now();
    for (i, snap) in graph.snapshots().iter().enumerate() {
        let path = args.out_dir.join(format!("snapshot_{:03}.txt", i + 1));
        let mut out = create(&path)?;
        snap.write_edge_list(&mut out, i + 1).map_err(io_at(&path))?;
        out.flush().map_err(io_at(&path))?;
        manifest.add_artifact(path);
    }
    if !args.dense_ids {
        let path = args.out_dir.join("id_map.txt");
        let mut out = create(&path)?;
        edges.write_id_map(&mut out).map_err(io_at(&path))?;
        out.flush().map_err(io_at(&path))?;
        manifest.add_artifact(path);
    }
    manifest
        .timings_ms
        .insert("write".into(), write_start.elapsed().as_secs_f64() * 1e3);
    let bytes = edges.records.len() * std::mem::size_of::<crate::graph::TemporalEdge>()
        + graph.snapshots().iter().map(GraphSnapshot::heap_bytes).sum::<usize>();
    manifest.note_memory(bytes);
    manifest.write(&args.out_dir.join("manifest.json"))?;
    Ok(manifest)
}

/// Fit settings that may come from a config file; every field optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitOverrides {
    pub k: Option<usize>,
    pub lambda: Option<f64>,
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub zeta: Option<f64>,
    pub delta: Option<f64>,
    pub threads: Option<usize>,
}

impl FitOverrides {
    /// Fields set in `other` win.
    pub fn merged(&self, other: &FitOverrides) -> FitOverrides {
        FitOverrides {
            k: other.k.or(self.k),
            lambda: other.lambda.or(self.lambda),
            max_iters: other.max_iters.or(self.max_iters),
            tol: other.tol.or(self.tol),
            seed: other.seed.or(self.seed),
            zeta: other.zeta.or(self.zeta),
            delta: other.delta.or(self.delta),
            threads: other.threads.or(self.threads),
        }
    }

    pub fn apply(&self, algo: Algorithm) -> SolverConfig {
        let base = SolverConfig::for_algorithm(algo);
        SolverConfig {
            k: self.k.unwrap_or(base.k),
            lambda: self.lambda.unwrap_or(base.lambda),
            max_iters: self.max_iters.unwrap_or(base.max_iters),
            tol: self.tol.unwrap_or(base.tol),
            seed: self.seed.unwrap_or(base.seed),
            zeta: self.zeta.or(base.zeta),
            delta: self.delta.or(base.delta),
            threads: self.threads.unwrap_or(base.threads),
            ..base
        }
    }
}

/// Config file path: `$TLATENT_CONFIG` if set, else `tlatent.json` when it
/// exists in the working directory.
pub fn config_path() -> Option<PathBuf> {
    match std::env::var_os(CONFIG_ENV) {
        Some(p) if !p.is_empty() => Some(PathBuf::from(p)),
        _ => {
            let p = PathBuf::from(DEFAULT_CONFIG_FILE);
            p.exists().then_some(p)
        }
    }
}

pub fn load_overrides(path: &Path) -> Result<FitOverrides> {
    let text = std::fs::read_to_string(path).map_err(io_at(path))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: format!("{}: {e}", path.display()),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitArgs {
    pub snapshots: Vec<PathBuf>,
    pub out_dir: PathBuf,
    pub algo: Algorithm,
    pub overrides: FitOverrides,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub algo: Algorithm,
    pub config: SolverConfig,
    pub zeta: f64,
    pub delta: f64,
    pub iterations_used: Vec<usize>,
    pub snapshot_traces: Vec<Vec<f64>>,
    pub objective_trace: Vec<f64>,
    pub work: Vec<WorkCounters>,
    pub affected: Vec<Vec<AffectedStats>>,
}

/// Fits latent spaces to snapshot files; writes `latent_XXX.txt`,
/// `trace.tsv`, `diagnostics.json` and the manifest. On a numerical failure
/// `failure.json` is written before the error is returned.
pub fn cmd_fit(args: &FitArgs) -> Result<(RunManifest, Trajectory)> {
    let file_overrides = match config_path() {
        Some(p) => load_overrides(&p)?,
        None => FitOverrides::default(),
    };
    let cfg = file_overrides.merged(&args.overrides).apply(args.algo);
    cfg.validate()?;
    let mut manifest = RunManifest::new(
        "fit",
        serde_json::json!({ "algo": args.algo, "solver": cfg, "snapshots": args.snapshots }),
        Some(cfg.seed),
    );
    for p in &args.snapshots {
        manifest.add_input(p)?;
    }
    ensure_dir(&args.out_dir)?;
    let graph = manifest.time("load", || read_dynamic_graph(&args.snapshots))?;
    let traj = match manifest.time("fit", || fit(&graph, args.algo, &cfg)) {
        Ok(t) => t,
        Err(e) => {
            if matches!(e, Error::Numerical(_)) {
                let dump = serde_json::json!({ "error": e.to_string(), "algo": args.algo, "config": cfg });
                write_json(&args.out_dir.join("failure.json"), &dump)?;
            }
            return Err(e);
        }
    };

    let write_start = std::time::Instant::now();
    let first_tau = graph.len() + 1 - traj.len();
    for (i, z) in traj.spaces.iter().enumerate() {
        let tau = first_tau + i;
        let path = args.out_dir.join(format!("latent_{tau:03}.txt"));
        let mut out = create(&path)?;
        z.write(&mut out, tau).map_err(io_at(&path))?;
        out.flush().map_err(io_at(&path))?;
        manifest.add_artifact(path);
    }
    let trace_path = args.out_dir.join("trace.tsv");
    let mut out = create(&trace_path)?;
    writeln!(out, "snapshot\titeration\tobjective").map_err(io_at(&trace_path))?;
    for (tau, tr) in traj.snapshot_traces.iter().enumerate() {
        for (r, v) in tr.iter().enumerate() {
            writeln!(out, "{}\t{r}\t{v:.12e}", tau + 1).map_err(io_at(&trace_path))?;
        }
    }
    out.flush().map_err(io_at(&trace_path))?;
    manifest.add_artifact(trace_path);

    let (zeta, delta) = cfg.thresholds(graph.n());
    let diagnostics = FitDiagnostics {
        algo: args.algo,
        config: cfg.clone(),
        zeta,
        delta,
        iterations_used: traj.iterations_used.clone(),
        snapshot_traces: traj.snapshot_traces.clone(),
        objective_trace: traj.objective_trace.clone(),
        work: traj.work.clone(),
        affected: traj.affected.clone(),
    };
    let diag_path = args.out_dir.join("diagnostics.json");
    write_json(&diag_path, &diagnostics)?;
    manifest.add_artifact(diag_path);
    manifest
        .timings_ms
        .insert("write".into(), write_start.elapsed().as_secs_f64() * 1e3);

    let graph_bytes: usize = graph.snapshots().iter().map(GraphSnapshot::heap_bytes).sum();
    let space_bytes: usize = traj.spaces.iter().map(LatentSpace::heap_bytes).sum();
    manifest.note_memory(graph_bytes + space_bytes);
    manifest.write(&args.out_dir.join("manifest.json"))?;
    Ok((manifest, traj))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    #[default]
    None,
    /// Adamic-Adar on the aggregate of the training snapshots.
    Aa,
    /// The last training snapshot itself.
    Gpre,
}

impl std::str::FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Baseline::None),
            "aa" => Ok(Baseline::Aa),
            "gpre" => Ok(Baseline::Gpre),
            other => Err(Error::contract(format!("unknown baseline `{other}` (expected aa, gpre or none)"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalArgs {
    /// Latent files; the last one scores the test snapshot.
    pub latent: Vec<PathBuf>,
    /// Held-out snapshot file.
    pub test: PathBuf,
    /// Training snapshots, oldest first. Needed for new-links mode, the
    /// baselines and history exclusion; when their count matches `latent`
    /// the prediction error covers every step, otherwise only the held-out one.
    pub train: Vec<PathBuf>,
    pub mode: PairMode,
    pub pairs: usize,
    pub seed: u64,
    pub baseline: Baseline,
    /// Never draw pairs linked in any training snapshot as non-linked.
    pub exclude_history: bool,
    pub out: PathBuf,
    pub pairs_out: Option<PathBuf>,
    /// Leave `timings` empty so reports are byte-comparable.
    pub no_timings: bool,
}

/// Scores held-out pairs and writes an [`EvalReport`] to `args.out` plus a
/// manifest beside it.
pub fn cmd_eval(args: &EvalArgs) -> Result<(RunManifest, EvalReport)> {
    let mut manifest = RunManifest::new("eval", echo(args), Some(args.seed));
    for p in args.latent.iter().chain(&args.train).chain(std::iter::once(&args.test)) {
        manifest.add_input(p)?;
    }
    let last_latent = args
        .latent
        .last()
        .ok_or_else(|| Error::contract("at least one latent file is required"))?;
    let mut timings = std::collections::BTreeMap::new();
    let start = std::time::Instant::now();
    let spaces = args.latent.iter().map(|p| read_latent(p).map(|s| s.1)).collect::<Result<Vec<_>>>()?;
    let (_, test) = read_snapshot(&args.test)?;
    let train = args.train.iter().map(|p| read_snapshot(p).map(|s| s.1)).collect::<Result<Vec<_>>>()?;
    let z = spaces.last().unwrap();
    if z.n() != test.n() {
        return Err(Error::dimension(format!(
            "{} has {} nodes but test snapshot has {}",
            last_latent.display(),
            z.n(),
            test.n()
        )));
    }
    for (p, s) in args.train.iter().zip(&train) {
        if s.n() != test.n() {
            return Err(Error::dimension(format!("{} has {} nodes, test has {}", p.display(), s.n(), test.n())));
        }
    }
    timings.insert("load".to_string(), start.elapsed().as_secs_f64() * 1e3);

    let start = std::time::Instant::now();
    let aggregate = (!train.is_empty()).then(|| DynamicGraph::new(train.clone()).map(|g| g.aggregate())).transpose()?;
    let sampling = PairSampling {
        count_per_class: args.pairs,
        mode: args.mode,
        seed: args.seed,
        exclude: if args.exclude_history { aggregate.as_ref() } else { None },
    };
    if args.exclude_history && aggregate.is_none() {
        return Err(Error::contract("history exclusion needs training snapshots"));
    }
    let pairs = sample_test_pairs(&test, train.last(), &sampling)?;
    timings.insert("sample".to_string(), start.elapsed().as_secs_f64() * 1e3);
    if let Some(path) = &args.pairs_out {
        let mut out = create(path)?;
        pairs.write(&mut out).map_err(io_at(path))?;
        out.flush().map_err(io_at(path))?;
        manifest.add_artifact(path.clone());
    }

    let start = std::time::Instant::now();
    let labels = pairs.labels();
    let scores = score_pairs(&pairs, |u, v| score_pair(z, u, v).unwrap_or(f64::NAN));
    let roc = auc_roc(&scores, &labels)?;
    let pr = auc_pr(&scores, &labels)?;
    let baseline = match args.baseline {
        Baseline::None => None,
        Baseline::Aa => {
            let agg = aggregate.as_ref().ok_or_else(|| Error::contract("the aa baseline needs training snapshots"))?;
            let s = score_pairs(&pairs, |u, v| adamic_adar(agg, u, v));
            Some(BaselineReport {
                name: "aa".into(),
                auc_roc: auc_roc(&s, &labels)?,
                auc_pr: auc_pr(&s, &labels)?,
            })
        }
        Baseline::Gpre => {
            let last = train.last().ok_or_else(|| Error::contract("the gpre baseline needs training snapshots"))?;
            let s = score_pairs(&pairs, |u, v| previous_graph_baseline(last, u, v, false));
            Some(BaselineReport {
                name: "gpre".into(),
                auc_roc: auc_roc(&s, &labels)?,
                auc_pr: auc_pr(&s, &labels)?,
            })
        }
    };
    let prediction_error = if !train.is_empty() && train.len() == spaces.len() {
        let mut snaps = train.clone();
        snaps.push(test.clone());
        prediction_error_spaces(&DynamicGraph::new(snaps)?, &spaces)?
    } else {
        residual(&test, z)?.sqrt()
    };
    timings.insert("score".to_string(), start.elapsed().as_secs_f64() * 1e3);

    if args.no_timings {
        timings.clear();
    }
    let report = EvalReport {
        auc_roc: roc,
        auc_pr: pr,
        prediction_error,
        pairs: PairSummary::of(&pairs),
        baseline,
        timings: timings.clone(),
        config: serde_json::json!({
            "mode": args.mode,
            "pairs": args.pairs,
            "seed": args.seed,
            "baseline": args.baseline,
            "exclude_history": args.exclude_history,
        }),
    };
    report.validate()?;
    write_json(&args.out, &report)?;
    manifest.add_artifact(args.out.clone());
    manifest.timings_ms = timings;
    let bytes = spaces.iter().map(LatentSpace::heap_bytes).sum::<usize>()
        + test.heap_bytes()
        + train.iter().map(GraphSnapshot::heap_bytes).sum::<usize>()
        + pairs.len() * std::mem::size_of::<crate::eval::LabeledPair>();
    manifest.note_memory(bytes);
    manifest.write(&sibling(&args.out, "manifest.json"))?;
    Ok((manifest, report))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GenArgs {
    pub n: usize,
    pub blocks: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub drift: f64,
    pub snapshots: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// Optional `tau node block` file.
    pub memberships_out: Option<PathBuf>,
}

/// Writes a planted-partition stream as a timestamped edge list whose
/// snapshot `tau` (0-based) carries time `tau + 0.5`.
pub fn cmd_gen(args: &GenArgs) -> Result<RunManifest> {
    let params = PlantedPartitionParams {
        n: args.n,
        blocks: args.blocks,
        p_in: args.p_in,
        p_out: args.p_out,
        drift_fraction: args.drift,
        snapshots: args.snapshots,
        seed: args.seed,
    };
    let mut manifest = RunManifest::new("gen", echo(args), Some(args.seed));
    let pp = manifest.time("generate", || planted_partition_generate(&params))?;
    let edges = pp.to_temporal_edges();
    let mut out = create(&args.out)?;
    edges.write(&mut out).map_err(io_at(&args.out))?;
    out.flush().map_err(io_at(&args.out))?;
    manifest.add_artifact(args.out.clone());
    if let Some(path) = &args.memberships_out {
        let mut out = create(path)?;
        for (tau, blocks) in pp.memberships.iter().enumerate() {
            for (u, b) in blocks.iter().enumerate() {
                writeln!(out, "{tau} {u} {b}").map_err(io_at(path))?;
            }
        }
        out.flush().map_err(io_at(path))?;
        manifest.add_artifact(path.clone());
    }
    manifest.note_memory(pp.graph.snapshots().iter().map(GraphSnapshot::heap_bytes).sum());
    manifest.write(&sibling(&args.out, "manifest.json"))?;
    Ok(manifest)
}

/// `dir/name.ext` -> `dir/name.ext.<suffix>`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

/// Process exit code for a failed command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Numerical(_) => 1,
        _ => 2,
    }
}
