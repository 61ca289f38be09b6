use std::borrow::Borrow;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{DynamicGraph, GraphSnapshot};
use crate::latent::objective::local_objective_with_gram;
use crate::latent::{lipschitz_constant, Gram, LatentSpace, StepSchedule, Trajectory, WorkCounters};
use crate::solver::update::{color_classes, converged, sweep, Schedule, Scratch};
use crate::solver::{check_graph, SolverConfig};

/// Diagnostics of a streamed local fit.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LocalFitSummary {
    pub snapshot_traces: Vec<Vec<f64>>,
    pub iterations_used: Vec<usize>,
    pub work: Vec<WorkCounters>,
}

/// Outcome of fitting one snapshot's space in place.
pub(crate) struct SnapshotFit {
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub work: WorkCounters,
}

/// Runs inner sweeps on `z` for snapshot `g` until the local objective
/// settles. `prev` is the previous snapshot's space (absent at the first
/// snapshot, where the smoothness term vanishes).
pub(crate) fn fit_snapshot(
    g: &GraphSnapshot,
    z: &mut LatentSpace,
    gram: &mut Gram,
    prev: Option<&LatentSpace>,
    cfg: &SolverConfig,
    scratch: &mut Scratch,
) -> Result<SnapshotFit> {
    let schedule = cfg.schedule.resolve(cfg.threads);
    let classes = (schedule == Schedule::Colored).then(|| color_classes(g));
    let max_sweeps = if g.m() == 0 {
        log::warn!("snapshot has no edges; running a single sweep");
        1
    } else {
        cfg.max_iters
    };

    gram.recompute(z);
    let first = local_objective_with_gram(g, z, gram, prev, cfg.lambda);
    let mut trace = vec![first];
    let mut steps = StepSchedule::new(lipschitz_constant(z.n(), z.k()));
    let mut work = WorkCounters::default();
    let temporal = |u: usize, out: &mut [f64]| -> bool {
        match prev {
            Some(p) => {
                out.copy_from_slice(p.row(u));
                true
            }
            None => false,
        }
    };

    let mut last = first;
    let mut iterations = 0;
    for r in 0..max_sweeps {
        let alpha = steps.alpha(r);
        if r > 0 {
            gram.recompute(z);
        }
        sweep(
            g,
            z,
            gram,
            temporal,
            alpha,
            cfg.lambda,
            schedule,
            classes.as_deref(),
            scratch,
            &mut work,
        );
        iterations += 1;
        let value = local_objective_with_gram(g, z, gram, prev, cfg.lambda);
        if !value.is_finite() {
            return Err(Error::Numerical(format!(
                "local objective became {value} at inner iteration {iterations}"
            )));
        }
        trace.push(value);
        if converged(last, value, cfg.tol) {
            break;
        }
        last = value;
    }
    Ok(SnapshotFit {
        trace,
        iterations,
        work,
    })
}

/// Sequential fit over a stream of snapshots.
///
/// At most one snapshot (owned by the iterator) and two latent spaces are
/// alive at any time. `sink(tau, z)` receives each fitted space in order.
pub fn fit_local_streaming<I, S, F>(
    n: usize,
    snapshots: I,
    cfg: &SolverConfig,
    mut sink: F,
) -> Result<LocalFitSummary>
where
    I: IntoIterator<Item = Result<S>>,
    S: Borrow<GraphSnapshot>,
    F: FnMut(usize, &LatentSpace) -> Result<()>,
{
    cfg.validate()?;
    if n < 2 {
        return Err(Error::contract("at least two nodes are required"));
    }
    let k = cfg.k;
    let pool = cfg.thread_pool()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut current = LatentSpace::random(n, k, &mut rng);
    let mut previous: Option<LatentSpace> = None;
    let mut gram = Gram::zeros(k);
    let mut scratch = Scratch::new(k);
    let mut summary = LocalFitSummary::default();

    for (tau, snap) in snapshots.into_iter().enumerate() {
        let snap = snap?;
        let g: &GraphSnapshot = snap.borrow();
        if g.n() != n {
            return Err(Error::dimension(format!(
                "snapshot {tau} has {} nodes, expected {n}",
                g.n()
            )));
        }
        if let Some(prev) = &previous {
            current.copy_from(prev);
        }
        let fit = pool.install(|| {
            fit_snapshot(g, &mut current, &mut gram, previous.as_ref(), cfg, &mut scratch)
        })?;
        summary.snapshot_traces.push(fit.trace);
        summary.iterations_used.push(fit.iterations);
        summary.work.push(fit.work);
        sink(tau, &current)?;
        match &mut previous {
            Some(prev) => std::mem::swap(prev, &mut current),
            None => previous = Some(current.clone()),
        }
    }
    if summary.iterations_used.is_empty() {
        return Err(Error::contract("no snapshots supplied"));
    }
    Ok(summary)
}

/// Fits `Z_1..Z_t` one snapshot at a time, seeding each space with the
/// previous one.
pub fn fit_local(g: &DynamicGraph, cfg: &SolverConfig) -> Result<Trajectory> {
    check_graph(g, cfg)?;
    let mut spaces = Vec::with_capacity(if cfg.keep_spaces { g.len() } else { 1 });
    let total = g.len();
    let summary = fit_local_streaming(g.n(), g.snapshots().iter().map(Ok), cfg, |tau, z| {
        if cfg.keep_spaces || tau + 1 == total {
            spaces.push(z.clone());
        }
        Ok(())
    })?;
    Ok(Trajectory {
        spaces,
        objective_trace: summary.snapshot_traces.iter().flatten().copied().collect(),
        snapshot_traces: summary.snapshot_traces,
        iterations_used: summary.iterations_used,
        work: summary.work,
        affected: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latent::local_objective;

    fn path_snapshot() -> GraphSnapshot {
        GraphSnapshot::from_edges(8, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (4, 5, 1.0), (5, 6, 1.0), (6, 7, 1.0)])
            .unwrap()
    }

    #[test]
    fn identical_snapshots_settle() {
        let g = DynamicGraph::new(vec![path_snapshot(); 4]).unwrap();
        let cfg = SolverConfig { k: 3, seed: 2, ..SolverConfig::default() };
        let traj = fit_local(&g, &cfg).unwrap();
        traj.validate().unwrap();
        let dist = |a: &LatentSpace, b: &LatentSpace| {
            a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
        };
        let d: Vec<f64> = (1..4).map(|t| dist(&traj.spaces[t], &traj.spaces[t - 1])).collect();
        assert!(d[2] <= d[0], "{d:?}");
    }

    #[test]
    fn per_snapshot_endpoints_decrease() {
        let g = DynamicGraph::new(vec![path_snapshot(); 3]).unwrap();
        let cfg = SolverConfig { k: 2, seed: 8, ..SolverConfig::default() };
        let traj = fit_local(&g, &cfg).unwrap();
        for (tau, tr) in traj.snapshot_traces.iter().enumerate() {
            assert!(tr.last() <= tr.first(), "tau {tau}: {tr:?}");
            assert_eq!(tr.len(), traj.iterations_used[tau] + 1);
        }
        let prev = Some(&traj.spaces[1]);
        let direct = local_objective(g.snapshot(2), &traj.spaces[2], prev, cfg.lambda).unwrap();
        assert!((direct - traj.snapshot_traces[2].last().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn keep_spaces_off_retains_last() {
        let g = DynamicGraph::new(vec![path_snapshot(); 3]).unwrap();
        let cfg = SolverConfig { k: 2, seed: 8, ..SolverConfig::default() };
        let full = fit_local(&g, &cfg).unwrap();
        let lean = fit_local(&g, &SolverConfig { keep_spaces: false, ..cfg }).unwrap();
        assert_eq!(lean.spaces.len(), 1);
        assert_eq!(lean.last(), full.last());
    }

    #[test]
    fn streaming_rejects_wrong_size() {
        let snaps = vec![Ok(GraphSnapshot::empty(3)), Ok(GraphSnapshot::empty(4))];
        let cfg = SolverConfig { k: 2, ..SolverConfig::default() };
        assert!(fit_local_streaming(3, snaps, &cfg, |_, _| Ok(())).is_err());
    }
}
