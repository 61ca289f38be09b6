//! Change-driven maintenance of `Z_tau` from `Z_{tau-1}`.
//!
//! Rows of nodes whose adjacency is unchanged are carried over untouched;
//! changed rows are re-seeded from their neighbors, and only an affected set
//! `S` is swept. After each pass `S` drops nodes that stopped moving (every
//! coordinate within `delta`) and gains neighbors whose pair score moved by
//! at least `zeta`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{diff_snapshots, DynamicGraph, GraphSnapshot};
use crate::latent::objective::local_objective_with_gram;
use crate::latent::{
    dot, lipschitz_constant, row_normalize, AffectedStats, Gram, LatentSpace, StepSchedule, Trajectory,
    WorkCounters,
};
use crate::solver::local::fit_snapshot;
use crate::solver::update::{commit_row, compute_update, count_update, Scratch};
use crate::solver::{check_graph, AffectedBaseline, SolverConfig};

/// Working set of nodes whose rows may still move.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AffectedSet {
    /// Ascending node ids.
    pub members: Vec<usize>,
    /// Inner iteration that produced this set (0 = the changed nodes).
    pub generation: usize,
}

impl AffectedSet {
    pub fn new(members: Vec<usize>) -> Self {
        let mut members = members;
        members.sort_unstable();
        members.dedup();
        AffectedSet {
            members,
            generation: 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }
}

/// Carries `z_prev` over and re-seeds every node in `changed` with the
/// weighted mean of its neighbors' current rows, normalized. Changed nodes
/// with no neighbors get the uniform row. Nodes are processed in ascending
/// order, so later nodes see the re-seeded rows of earlier ones.
pub fn init_updated_rows(g: &GraphSnapshot, z_prev: &LatentSpace, changed: &[usize]) -> Result<LatentSpace> {
    if g.n() != z_prev.n() {
        return Err(Error::dimension("snapshot and latent space sizes differ"));
    }
    let mut z = z_prev.clone();
    let mut row = vec![0.0; z.k()];
    for &u in changed {
        seed_row(g, &z, u, &mut row);
        z.set_row(u, &row);
    }
    Ok(z)
}

fn seed_row(g: &GraphSnapshot, z: &LatentSpace, u: usize, out: &mut [f64]) {
    out.fill(0.0);
    let mut total = 0.0;
    for (v, w) in g.neighbors(u) {
        total += w;
        for (o, x) in out.iter_mut().zip(z.row(v)) {
            *o += w * x;
        }
    }
    if total > 0.0 {
        for o in out.iter_mut() {
            *o /= total;
        }
    }
    row_normalize(out);
}

/// Membership bitmap reused across refreshes.
struct Membership {
    flag: Vec<bool>,
    touched: Vec<usize>,
}

impl Membership {
    fn new(n: usize) -> Self {
        Membership {
            flag: vec![false; n],
            touched: Vec::new(),
        }
    }

    fn insert(&mut self, u: usize) {
        if !self.flag[u] {
            self.flag[u] = true;
            self.touched.push(u);
        }
    }

    fn remove(&mut self, u: usize) {
        self.flag[u] = false;
    }

    /// Sorted members; leaves the bitmap cleared.
    fn drain_sorted(&mut self) -> Vec<usize> {
        let mut out: Vec<usize> = self.touched.iter().copied().filter(|&u| self.flag[u]).collect();
        for &u in &self.touched {
            self.flag[u] = false;
        }
        self.touched.clear();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Affected-set refresh with the previous rows supplied by `before(u)`.
fn refresh_with<'a>(
    z_cur: &LatentSpace,
    before: impl Fn(usize) -> &'a [f64],
    old: &[usize],
    g: &GraphSnapshot,
    delta: f64,
    zeta: f64,
    set: &mut Membership,
) -> Vec<usize> {
    for &u in old {
        set.insert(u);
    }
    for &u in old {
        let (cur_u, prev_u) = (z_cur.row(u), before(u));
        if cur_u.iter().zip(prev_u).all(|(a, b)| (a - b).abs() < delta) {
            set.remove(u);
        }
        for (w, _) in g.neighbors(u) {
            let moved = (dot(cur_u, z_cur.row(w)) - dot(prev_u, before(w))).abs();
            if moved >= zeta {
                set.insert(w);
            }
        }
    }
    set.drain_sorted()
}

/// One refresh of the affected set.
///
/// Starting from `old`, each member is dropped if every coordinate moved by
/// less than `delta` between `z_before` and `z_cur`; each neighbor `w` (in
/// `g`) of a member `u` is added if `|Z(u).Z(w)|` moved by at least `zeta`.
pub fn refresh_affected_set(
    z_cur: &LatentSpace,
    z_before: &LatentSpace,
    old: &AffectedSet,
    g: &GraphSnapshot,
    delta: f64,
    zeta: f64,
) -> AffectedSet {
    let mut set = Membership::new(z_cur.n());
    let members = refresh_with(z_cur, |u| z_before.row(u), &old.members, g, delta, zeta, &mut set);
    AffectedSet {
        members,
        generation: old.generation + 1,
    }
}

/// Distinct nodes in `S ∪ N(S)` and the size of `N(S) \ S`.
fn neighborhood_size(g: &GraphSnapshot, members: &[usize], set: &mut Membership) -> AffectedStats {
    for &u in members {
        set.insert(u);
    }
    let mut outside = 0;
    for &u in members {
        for (w, _) in g.neighbors(u) {
            if !set.flag[w] {
                set.insert(w);
                outside += 1;
            }
        }
    }
    set.drain_sorted();
    AffectedStats {
        affected: members.len(),
        neighborhood: outside,
    }
}

/// Fits `Z_1` like the local solver, then maintains each later space by
/// updating only affected nodes.
pub fn fit_incremental(g: &DynamicGraph, cfg: &SolverConfig) -> Result<Trajectory> {
    check_graph(g, cfg)?;
    let (n, k) = (g.n(), cfg.k);
    let (zeta, delta) = cfg.thresholds(n);
    let lipschitz = lipschitz_constant(n, k);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut first = LatentSpace::random(n, k, &mut rng);
    let mut gram = Gram::zeros(k);
    let mut scratch = Scratch::new(k);
    let pool = cfg.thread_pool()?;
    let fit = pool.install(|| fit_snapshot(g.snapshot(0), &mut first, &mut gram, None, cfg, &mut scratch))?;

    let mut traj = Trajectory {
        spaces: vec![first],
        objective_trace: fit.trace.clone(),
        snapshot_traces: vec![fit.trace],
        iterations_used: vec![fit.iterations],
        work: vec![fit.work],
        affected: vec![Vec::new()],
    };

    let mut set = Membership::new(n);
    let mut saved: Vec<f64> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    let mut swaps_since_refresh = 0usize;

    for tau in 1..g.len() {
        let snap = g.snapshot(tau);
        let prev_space = &traj.spaces[tau - 1];
        let changes = diff_snapshots(g.snapshot(tau - 1), snap)?;
        let mut z = init_updated_rows(snap, prev_space, &changes.changed_nodes)?;
        for &u in &changes.changed_nodes {
            gram.row_swap(prev_space.row(u), z.row(u));
        }
        swaps_since_refresh += changes.changed_nodes.len();

        let mut work = WorkCounters::default();
        let mut sizes = Vec::new();
        let start = local_objective_with_gram(snap, &z, &gram, Some(prev_space), cfg.lambda);
        let mut trace = vec![start];
        let mut steps = StepSchedule::new(lipschitz);
        let mut affected = changes.changed_nodes.clone();
        let mut r = 0;

        while !affected.is_empty() && r < cfg.max_iters {
            if swaps_since_refresh > n {
                gram.recompute(&z);
                swaps_since_refresh = 0;
            }
            let alpha = steps.alpha(r);
            let stats = neighborhood_size(snap, &affected, &mut set);
            work.node_work += (stats.affected + stats.neighborhood) as u64;
            sizes.push(stats);

            saved.clear();
            for (i, &u) in affected.iter().enumerate() {
                slot[u] = i;
                saved.extend_from_slice(z.row(u));
            }
            for &u in &affected {
                let d = compute_update(
                    snap,
                    &z,
                    &gram,
                    u,
                    |t| {
                        t.copy_from_slice(prev_space.row(u));
                        true
                    },
                    alpha,
                    cfg.lambda,
                    &mut scratch,
                );
                let mut row = std::mem::take(&mut scratch.out);
                commit_row(&mut z, &mut gram, u, &mut row);
                scratch.out = row;
                count_update(&mut work, d, k);
            }
            swaps_since_refresh += affected.len();

            let next = match cfg.affected_baseline {
                AffectedBaseline::PreviousIterate => {
                    let before = |u: usize| -> &[f64] {
                        match slot[u] {
                            usize::MAX => z.row(u),
                            i => &saved[i * k..(i + 1) * k],
                        }
                    };
                    refresh_with(&z, before, &affected, snap, delta, zeta, &mut set)
                }
                AffectedBaseline::PreviousSnapshot => {
                    refresh_with(&z, |u| prev_space.row(u), &affected, snap, delta, zeta, &mut set)
                }
            };
            for &u in &affected {
                slot[u] = usize::MAX;
            }
            affected = next;
            r += 1;
        }

        if r > 0 {
            let end = local_objective_with_gram(snap, &z, &gram, Some(prev_space), cfg.lambda);
            if !end.is_finite() {
                return Err(Error::Numerical(format!(
                    "local objective became {end} at snapshot {tau}"
                )));
            }
            trace.push(end);
        }
        traj.objective_trace.extend_from_slice(&trace);
        traj.snapshot_traces.push(trace);
        traj.iterations_used.push(r);
        traj.work.push(work);
        traj.affected.push(sizes);
        traj.spaces.push(z);
    }
    Ok(traj)
}
