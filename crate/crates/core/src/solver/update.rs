//! Projected accelerated row updates and the sweep engines built on them.

use rayon::prelude::*;

use crate::graph::GraphSnapshot;
use crate::latent::{neighbor_sum, row_normalize, Gram, LatentSpace, WorkCounters};

/// Scratch rows reused across updates.
pub(crate) struct Scratch {
    nbr: Vec<f64>,
    zg: Vec<f64>,
    temporal: Vec<f64>,
    pub(crate) out: Vec<f64>,
}

impl Scratch {
    pub(crate) fn new(k: usize) -> Self {
        Scratch {
            nbr: vec![0.0; k],
            zg: vec![0.0; k],
            temporal: vec![0.0; k],
            out: vec![0.0; k],
        }
    }
}

/// `out = max((1+2a) z + a*lambda*temporal + 2a*nbr - 2a*(z Gram), 0)`.
///
/// Both published update rules reduce to this with different `temporal`
/// rows, so they are bitwise identical whenever `lambda = 0`.
#[inline]
fn projected_step(
    z_u: &[f64],
    nbr: &[f64],
    zg: &[f64],
    temporal: &[f64],
    alpha: f64,
    lambda: f64,
    out: &mut [f64],
) {
    let keep = 1.0 + 2.0 * alpha;
    let pull = alpha * lambda;
    let two_a = 2.0 * alpha;
    for c in 0..out.len() {
        let v = keep * z_u[c] + pull * temporal[c] + two_a * nbr[c] - two_a * zg[c];
        out[c] = if v > 0.0 { v } else { 0.0 };
    }
}

/// Computes the unnormalized update of row `u` into `scratch.out`.
/// `temporal` fills the temporal sum and returns `false` if there is none.
/// Returns the degree of `u`.
#[inline]
#[allow(clippy::too_many_arguments)]
pub(crate) fn compute_update(
    g: &GraphSnapshot,
    z: &LatentSpace,
    gram: &Gram,
    u: usize,
    temporal: impl FnOnce(&mut [f64]) -> bool,
    alpha: f64,
    lambda: f64,
    scratch: &mut Scratch,
) -> usize {
    let d = neighbor_sum(g, z, u, &mut scratch.nbr);
    gram.left_multiply(z.row(u), &mut scratch.zg);
    if !temporal(&mut scratch.temporal) {
        scratch.temporal.fill(0.0);
    }
    projected_step(
        z.row(u),
        &scratch.nbr,
        &scratch.zg,
        &scratch.temporal,
        alpha,
        lambda,
        &mut scratch.out,
    );
    d
}

#[inline]
pub(crate) fn count_update(work: &mut WorkCounters, degree: usize, k: usize) {
    let (d, k) = (degree as u64, k as u64);
    work.row_updates += 1;
    work.neighbor_reads += d;
    // neighbor accumulation, z*Gram, Gram row swap, step + normalize
    work.flops += d * k + 2 * k * k + 4 * k;
}

/// Normalizes `scratch.out`, swaps it into the Gram matrix and into `z`.
#[inline]
pub(crate) fn commit_row(z: &mut LatentSpace, gram: &mut Gram, u: usize, row: &mut [f64]) {
    row_normalize(row);
    gram.row_swap(z.row(u), row);
    z.set_row(u, row);
}

fn temporal_sum(prev: Option<&[f64]>, next: Option<&[f64]>, out: &mut [f64]) -> bool {
    match (prev, next) {
        (None, None) => false,
        (Some(p), None) => {
            out.copy_from_slice(p);
            true
        }
        (None, Some(q)) => {
            out.copy_from_slice(q);
            true
        }
        (Some(p), Some(q)) => {
            for ((o, a), b) in out.iter_mut().zip(p).zip(q) {
                *o = a + b;
            }
            true
        }
    }
}

/// One projected accelerated step for row `u` with both temporal neighbors
/// (either may be absent). Returns the row before normalization.
#[allow(clippy::too_many_arguments)]
pub fn update_row_global(
    g: &GraphSnapshot,
    z: &LatentSpace,
    u: usize,
    prev_row: Option<&[f64]>,
    next_row: Option<&[f64]>,
    alpha: f64,
    lambda: f64,
    gram: &Gram,
) -> Vec<f64> {
    let mut scratch = Scratch::new(z.k());
    compute_update(
        g,
        z,
        gram,
        u,
        |t| temporal_sum(prev_row, next_row, t),
        alpha,
        lambda,
        &mut scratch,
    );
    scratch.out
}

/// One projected accelerated step for row `u` pulled only toward the
/// previous snapshot's row. Returns the row before normalization.
pub fn update_row_local(
    g: &GraphSnapshot,
    z: &LatentSpace,
    u: usize,
    prev_row: Option<&[f64]>,
    alpha: f64,
    lambda: f64,
    gram: &Gram,
) -> Vec<f64> {
    let mut scratch = Scratch::new(z.k());
    compute_update(
        g,
        z,
        gram,
        u,
        |t| temporal_sum(prev_row, None, t),
        alpha,
        lambda,
        &mut scratch,
    );
    scratch.out
}

/// How rows within one snapshot are visited during a sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Schedule {
    /// Sequential when `threads == 1`, colored otherwise.
    #[default]
    Auto,
    /// Gauss–Seidel in ascending node order.
    Sequential,
    /// Color classes of the snapshot in order; rows of one class share no
    /// edge and are updated against a Gram matrix frozen for the class.
    /// The result does not depend on the thread count.
    Colored,
}

impl Schedule {
    pub(crate) fn resolve(self, threads: usize) -> Schedule {
        match self {
            Schedule::Auto if threads > 1 => Schedule::Colored,
            Schedule::Auto => Schedule::Sequential,
            other => other,
        }
    }
}

/// Greedy distance-1 coloring in ascending node order; each class is sorted.
pub fn color_classes(g: &GraphSnapshot) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut color = vec![usize::MAX; n];
    let mut used: Vec<usize> = Vec::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for u in 0..n {
        used.clear();
        for (v, _) in g.neighbors(u) {
            if color[v] != usize::MAX {
                used.push(color[v]);
            }
        }
        used.sort_unstable();
        used.dedup();
        let c = used
            .iter()
            .enumerate()
            .find(|&(i, &c)| i != c)
            .map_or(used.len(), |(i, _)| i);
        color[u] = c;
        if c == classes.len() {
            classes.push(Vec::new());
        }
        classes[c].push(u);
    }
    classes
}

/// Sweeps every row of `z` once.
///
/// `temporal(u, out)` writes the temporal pull for `u` and reports whether
/// one exists. With [`Schedule::Colored`], `classes` must be the color
/// classes of `g`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn sweep<T>(
    g: &GraphSnapshot,
    z: &mut LatentSpace,
    gram: &mut Gram,
    temporal: T,
    alpha: f64,
    lambda: f64,
    schedule: Schedule,
    classes: Option<&[Vec<usize>]>,
    scratch: &mut Scratch,
    work: &mut WorkCounters,
) where
    T: Fn(usize, &mut [f64]) -> bool + Sync,
{
    let k = z.k();
    match schedule {
        Schedule::Colored => {
            let classes = classes.expect("colored sweep needs color classes");
            let mut buf: Vec<f64> = Vec::new();
            for class in classes {
                buf.clear();
                buf.resize(class.len() * k, 0.0);
                let frozen_z: &LatentSpace = z;
                let frozen_gram: &Gram = gram;
                let degrees: Vec<usize> = buf
                    .par_chunks_mut(k)
                    .zip(class.par_iter())
                    .map_init(
                        || Scratch::new(k),
                        |s, (row, &u)| {
                            let d = compute_update(
                                g,
                                frozen_z,
                                frozen_gram,
                                u,
                                |t| temporal(u, t),
                                alpha,
                                lambda,
                                s,
                            );
                            row.copy_from_slice(&s.out);
                            row_normalize(row);
                            d
                        },
                    )
                    .collect();
                for ((row, &u), d) in buf.chunks_exact(k).zip(class).zip(degrees) {
                    gram.row_swap(z.row(u), row);
                    z.set_row(u, row);
                    count_update(work, d, k);
                }
            }
        }
        _ => {
            for u in 0..z.n() {
                let d = compute_update(g, z, gram, u, |t| temporal(u, t), alpha, lambda, scratch);
                let mut row = std::mem::take(&mut scratch.out);
                commit_row(z, gram, u, &mut row);
                scratch.out = row;
                count_update(work, d, k);
            }
        }
    }
    work.node_work += z.n() as u64;
}

/// Relative change test shared by the solvers.
pub(crate) fn converged(prev: f64, cur: f64, tol: f64) -> bool {
    let scale = prev.abs().max(cur.abs());
    scale == 0.0 || (prev - cur).abs() <= tol * scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latent::{gram, lipschitz_constant, step_coefficient};
    use crate::latent::oracle::dense_node_objective;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> GraphSnapshot {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < p {
                    edges.push((u, v, 1.0));
                }
            }
        }
        GraphSnapshot::from_edges(n, edges).unwrap()
    }

    #[test]
    fn isolated_node_fixed_point() {
        let g = GraphSnapshot::empty(2);
        let z = LatentSpace::from_rows(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let gr = gram(&z);
        let alpha = step_coefficient(0, lipschitz_constant(2, 2));
        assert_eq!(update_row_global(&g, &z, 0, None, None, alpha, 0.0, &gr), vec![1.0, 0.0]);
        assert_eq!(update_row_local(&g, &z, 0, None, alpha, 0.0, &gr), vec![1.0, 0.0]);
    }

    #[test]
    fn zero_lambda_rules_agree_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g = random_graph(8, 0.4, &mut rng);
            let z = LatentSpace::random(8, 3, &mut rng);
            let p = LatentSpace::random(8, 3, &mut rng);
            let q = LatentSpace::random(8, 3, &mut rng);
            let gr = gram(&z);
            let u = rng.gen_range(0..8);
            let a = rng.gen::<f64>();
            let global = update_row_global(&g, &z, u, Some(p.row(u)), Some(q.row(u)), a, 0.0, &gr);
            let local = update_row_local(&g, &z, u, Some(p.row(u)), a, 0.0, &gr);
            assert_eq!(global, local);
        }
    }

    #[test]
    fn single_update_decreases_node_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let g = random_graph(5, 0.5, &mut rng);
            let z = LatentSpace::random(5, 3, &mut rng);
            let prev = LatentSpace::random(5, 3, &mut rng);
            let next = LatentSpace::random(5, 3, &mut rng);
            let gr = gram(&z);
            let u = rng.gen_range(0..5);
            let lambda = 0.5;
            let alpha = step_coefficient(0, lipschitz_constant(5, 3));
            let updated =
                update_row_global(&g, &z, u, Some(prev.row(u)), Some(next.row(u)), alpha, lambda, &gr);
            let before =
                dense_node_objective(&g, &z, u, z.row(u), Some(prev.row(u)), Some(next.row(u)), lambda).unwrap();
            let after =
                dense_node_objective(&g, &z, u, &updated, Some(prev.row(u)), Some(next.row(u)), lambda).unwrap();
            assert!(after < before, "{after} !< {before}");
        }
    }

    #[test]
    fn coloring_is_proper_and_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_graph(40, 0.2, &mut rng);
        let classes = color_classes(&g);
        let mut seen = vec![false; 40];
        for class in &classes {
            for &u in class {
                assert!(!seen[u]);
                seen[u] = true;
                for &v in class {
                    assert!(!g.has_edge(u, v));
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn colored_sweep_independent_of_thread_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let g = random_graph(60, 0.15, &mut rng);
        let z0 = LatentSpace::random(60, 4, &mut rng);
        let classes = color_classes(&g);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let mut z = z0.clone();
                let mut gr = gram(&z);
                let mut scratch = Scratch::new(4);
                let mut work = WorkCounters::default();
                for r in 0..5 {
                    let a = step_coefficient(r, lipschitz_constant(60, 4));
                    sweep(&g, &mut z, &mut gr, |_, _| false, a, 0.0, Schedule::Colored,
                        Some(&classes), &mut scratch, &mut work);
                }
                z
            })
        };
        assert_eq!(run(1), run(4));
    }
}
