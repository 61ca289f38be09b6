use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use temporal_latent::eval::PairMode;
use temporal_latent::graph::Boundaries;
use temporal_latent::harness::{
    cmd_eval, cmd_fit, cmd_gen, cmd_snapshot, exit_code, Baseline, EvalArgs, FitArgs, FitOverrides, GenArgs,
    SnapshotArgs,
};
use temporal_latent::solver::Algorithm;

#[derive(Parser)]
#[command(name = "tlatent", version, about = "Temporal latent space inference and link prediction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Slice a `u v t [w]` interaction file into snapshot files.
    Snapshot(SnapshotCmd),
    /// Fit latent spaces to snapshot files.
    Fit(FitCmd),
    /// Score held-out pairs with a fitted space.
    Eval(EvalCmd),
    /// Generate a drifting planted-partition stream.
    Gen(GenCmd),
}

#[derive(Args)]
struct SnapshotCmd {
    input: PathBuf,
    #[arg(long, default_value = "snapshots")]
    out_dir: PathBuf,
    /// Number of equal-width intervals.
    #[arg(long = "snapshots", short = 'T', conflicts_with = "boundaries")]
    count: Option<usize>,
    /// Comma-separated cut points.
    #[arg(long, value_delimiter = ',')]
    boundaries: Option<Vec<f64>>,
    /// Map every weight to 1 (the default).
    #[arg(long, conflicts_with = "weighted")]
    binarize: bool,
    /// Keep summed interaction counts as weights.
    #[arg(long)]
    weighted: bool,
    /// Node ids are already dense integers.
    #[arg(long)]
    dense_ids: bool,
}

#[derive(Args)]
struct FitCmd {
    #[arg(required = true)]
    snapshots: Vec<PathBuf>,
    #[arg(long, default_value = "latent")]
    out_dir: PathBuf,
    #[arg(long, value_parser = parse_algo)]
    algo: Algorithm,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct EvalCmd {
    #[arg(required = true)]
    latent: Vec<PathBuf>,
    #[arg(long)]
    test: PathBuf,
    /// Training snapshots, oldest first (repeatable).
    #[arg(long)]
    train: Vec<PathBuf>,
    #[arg(long, default_value = "all", value_parser = parse_mode)]
    mode: PairMode,
    #[arg(long, default_value_t = 100_000)]
    pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "none", value_parser = parse_baseline)]
    baseline: Baseline,
    #[arg(long)]
    exclude_history: bool,
    #[arg(long, default_value = "report.json")]
    out: PathBuf,
    #[arg(long)]
    pairs_out: Option<PathBuf>,
    #[arg(long)]
    no_timings: bool,
}

#[derive(Args)]
struct GenCmd {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    blocks: usize,
    #[arg(long)]
    p_in: f64,
    #[arg(long)]
    p_out: f64,
    #[arg(long, default_value_t = 0.0)]
    drift: f64,
    #[arg(long = "T", short = 'T')]
    snapshots: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "edges.txt")]
    out: PathBuf,
    #[arg(long)]
    memberships_out: Option<PathBuf>,
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: temporal_latent::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<PairMode, String> {
    s.parse().map_err(|e: temporal_latent::Error| e.to_string())
}

fn parse_baseline(s: &str) -> Result<Baseline, String> {
    s.parse().map_err(|e: temporal_latent::Error| e.to_string())
}

fn run(cli: Cli) -> temporal_latent::Result<()> {
    match cli.command {
        Command::Snapshot(c) => {
            let boundaries = match (c.count, c.boundaries) {
                (_, Some(cuts)) => Boundaries::Cuts(cuts),
                (Some(t), None) => Boundaries::Equal(t),
                (None, None) => {
                    return Err(temporal_latent::Error::Contract("pass --snapshots or --boundaries".into()))
                }
            };
            let m = cmd_snapshot(&SnapshotArgs {
                input: c.input,
                out_dir: c.out_dir,
                boundaries,
                binarize: !c.weighted,
                dense_ids: c.dense_ids,
            })?;
            for a in &m.artifacts {
                println!("{}", a.display());
            }
        }
        Command::Fit(c) => {
            let overrides = FitOverrides {
                k: c.k,
                lambda: c.lambda,
                max_iters: c.max_iters,
                tol: c.tol,
                seed: c.seed,
                zeta: c.zeta,
                delta: c.delta,
                threads: c.threads,
            };
            let (_, traj) = cmd_fit(&FitArgs {
                snapshots: c.snapshots,
                out_dir: c.out_dir,
                algo: c.algo,
                overrides,
            })?;
            println!("iterations per snapshot: {:?}", traj.iterations_used);
        }
        Command::Eval(c) => {
            let (_, report) = cmd_eval(&EvalArgs {
                latent: c.latent,
                test: c.test,
                train: c.train,
                mode: c.mode,
                pairs: c.pairs,
                seed: c.seed,
                baseline: c.baseline,
                exclude_history: c.exclude_history,
                out: c.out,
                pairs_out: c.pairs_out,
                no_timings: c.no_timings,
            })?;
            println!("{}", serde_json::to_string(&report).unwrap_or_default());
        }
        Command::Gen(c) => {
            cmd_gen(&GenArgs {
                n: c.n,
                blocks: c.blocks,
                p_in: c.p_in,
                p_out: c.p_out,
                drift: c.drift,
                snapshots: c.snapshots,
                seed: c.seed,
                out: c.out,
                memberships_out: c.memberships_out,
            })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
