use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::DynamicGraph;
use crate::latent::objective::local_objective_with_gram;
use crate::latent::{lipschitz_constant, Gram, LatentSpace, StepSchedule, Trajectory, WorkCounters};
use crate::solver::update::{color_classes, converged, sweep, Schedule, Scratch};
use crate::solver::{check_graph, SolverConfig};

/// Jointly fits `Z_1..Z_t` by cyclic sweeps over every snapshot and node.
///
/// One sweep visits `tau = 1..t` and every node in turn, pulling each row
/// toward both temporal neighbors; the step coefficient advances once per
/// sweep. Stops when the relative objective change drops below `tol` or
/// after `max_iters` sweeps.
pub fn fit_global(g: &DynamicGraph, cfg: &SolverConfig) -> Result<Trajectory> {
    check_graph(g, cfg)?;
    let (n, k, t) = (g.n(), cfg.k, g.len());
    let schedule = cfg.schedule.resolve(cfg.threads);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let first = LatentSpace::random(n, k, &mut rng);
    let mut spaces: Vec<LatentSpace> = vec![first; t];
    let mut grams: Vec<Gram> = (0..t).map(|_| Gram::zeros(k)).collect();
    for (gr, z) in grams.iter_mut().zip(&spaces) {
        gr.recompute(z);
    }
    let classes: Option<Vec<Vec<Vec<usize>>>> =
        (schedule == Schedule::Colored).then(|| g.snapshots().iter().map(color_classes).collect());

    let max_sweeps = if g.total_edges() == 0 {
        log::warn!("dynamic graph has no edges; running a single sweep");
        1
    } else {
        cfg.max_iters
    };

    let per_snapshot = |spaces: &[LatentSpace], grams: &[Gram]| -> Vec<f64> {
        (0..t)
            .map(|tau| {
                let prev = (tau > 0).then(|| &spaces[tau - 1]);
                local_objective_with_gram(g.snapshot(tau), &spaces[tau], &grams[tau], prev, cfg.lambda)
            })
            .collect()
    };

    let mut snapshot_traces: Vec<Vec<f64>> = vec![Vec::new(); t];
    let mut trace = Vec::with_capacity(max_sweeps + 1);
    let record = |parts: Vec<f64>, traces: &mut Vec<Vec<f64>>, trace: &mut Vec<f64>| -> Result<f64> {
        let total: f64 = parts.iter().sum();
        if !total.is_finite() {
            return Err(Error::Numerical(format!(
                "objective became {total} after {} sweep(s)",
                trace.len().saturating_sub(1)
            )));
        }
        for (tr, p) in traces.iter_mut().zip(parts) {
            tr.push(p);
        }
        trace.push(total);
        Ok(total)
    };
    let mut last = record(per_snapshot(&spaces, &grams), &mut snapshot_traces, &mut trace)?;

    let mut steps = StepSchedule::new(lipschitz_constant(n, k));
    let mut scratch = Scratch::new(k);
    let mut work = vec![WorkCounters::default(); t];
    let pool = cfg.thread_pool()?;
    let mut sweeps = 0;

    pool.install(|| -> Result<()> {
        for r in 0..max_sweeps {
            let alpha = steps.alpha(r);
            for tau in 0..t {
                let (before, rest) = spaces.split_at_mut(tau);
                let (current, after) = rest.split_first_mut().unwrap();
                let prev = before.last();
                let next = after.first();
                let temporal = |u: usize, out: &mut [f64]| -> bool {
                    match (prev, next) {
                        (None, None) => false,
                        (Some(p), None) => {
                            out.copy_from_slice(p.row(u));
                            true
                        }
                        (None, Some(q)) => {
                            out.copy_from_slice(q.row(u));
                            true
                        }
                        (Some(p), Some(q)) => {
                            for ((o, a), b) in out.iter_mut().zip(p.row(u)).zip(q.row(u)) {
                                *o = a + b;
                            }
                            true
                        }
                    }
                };
                // refreshed each sweep so row-swap rounding cannot accumulate
                grams[tau].recompute(current);
                sweep(
                    g.snapshot(tau),
                    current,
                    &mut grams[tau],
                    temporal,
                    alpha,
                    cfg.lambda,
                    schedule,
                    classes.as_ref().map(|c| c[tau].as_slice()),
                    &mut scratch,
                    &mut work[tau],
                );
            }
            sweeps += 1;
            let value = record(per_snapshot(&spaces, &grams), &mut snapshot_traces, &mut trace)?;
            if converged(last, value, cfg.tol) {
                break;
            }
            last = value;
        }
        Ok(())
    })?;

    Ok(Trajectory {
        spaces,
        objective_trace: trace,
        snapshot_traces,
        iterations_used: vec![sweeps; t],
        work,
        affected: Vec::new(),
    })
}
