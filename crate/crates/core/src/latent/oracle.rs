//! Dense brute-force evaluations used as test oracles. They materialize full
//! `n x n` matrices and loop literally, so they are limited to small graphs.

use crate::error::{Error, Result};
use crate::graph::{DynamicGraph, GraphSnapshot};
use crate::latent::space::LatentSpace;

/// Largest graph the dense oracles accept.
pub const MAX_ORACLE_NODES: usize = 64;

fn refuse_large(n: usize) -> Result<()> {
    if n > MAX_ORACLE_NODES {
        return Err(Error::Refused(format!(
            "dense oracle limited to {MAX_ORACLE_NODES} nodes, got {n}"
        )));
    }
    Ok(())
}

fn dense_adjacency(g: &GraphSnapshot) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut a = vec![vec![0.0; n]; n];
    for u in 0..n {
        for v in 0..n {
            a[u][v] = g.weight(u, v);
        }
    }
    a
}

fn dense_product(z: &LatentSpace) -> Vec<Vec<f64>> {
    let n = z.n();
    let mut p = vec![vec![0.0; n]; n];
    for u in 0..n {
        for v in 0..n {
            let mut s = 0.0;
            for c in 0..z.k() {
                s += z.row(u)[c] * z.row(v)[c];
            }
            p[u][v] = s;
        }
    }
    p
}

/// Off-diagonal `||G - Z Z^T||_F^2` by a literal double loop.
pub fn dense_residual(g: &GraphSnapshot, z: &LatentSpace) -> Result<f64> {
    refuse_large(g.n())?;
    if g.n() != z.n() {
        return Err(Error::dimension("graph and latent space sizes differ"));
    }
    let a = dense_adjacency(g);
    let p = dense_product(z);
    let mut total = 0.0;
    for u in 0..g.n() {
        for v in 0..g.n() {
            if u != v {
                let d = a[u][v] - p[u][v];
                total += d * d;
            }
        }
    }
    Ok(total)
}

fn dense_smoothness(z: &LatentSpace, prev: &LatentSpace) -> f64 {
    let mut total = 0.0;
    for u in 0..z.n() {
        let mut s = 0.0;
        for c in 0..z.k() {
            s += z.row(u)[c] * prev.row(u)[c];
        }
        total += 1.0 - s;
    }
    total
}

/// Whole-trajectory objective computed densely.
pub fn dense_objective_oracle(g: &DynamicGraph, spaces: &[LatentSpace], lambda: f64) -> Result<f64> {
    refuse_large(g.n())?;
    if spaces.len() != g.len() {
        return Err(Error::dimension("trajectory length differs from snapshot count"));
    }
    let mut total = 0.0;
    for tau in 0..g.len() {
        total += dense_residual(g.snapshot(tau), &spaces[tau])?;
        if tau > 0 {
            total += lambda * dense_smoothness(&spaces[tau], &spaces[tau - 1]);
        }
    }
    Ok(total)
}

/// Single-snapshot objective computed densely.
pub fn dense_local_objective_oracle(
    g: &GraphSnapshot,
    z: &LatentSpace,
    prev: Option<&LatentSpace>,
    lambda: f64,
) -> Result<f64> {
    let mut total = dense_residual(g, z)?;
    if let Some(p) = prev {
        total += lambda * dense_smoothness(z, p);
    }
    Ok(total)
}

/// `(1/(t-1)) sum_{tau>=2} ||G_tau - Z_{tau-1} Z_{tau-1}^T||_F` computed densely.
pub fn dense_prediction_error_oracle(g: &DynamicGraph, spaces: &[LatentSpace]) -> Result<f64> {
    if g.len() < 2 || spaces.len() != g.len() {
        return Err(Error::contract("need at least two snapshots and matching spaces"));
    }
    let mut total = 0.0;
    for tau in 1..g.len() {
        total += dense_residual(g.snapshot(tau), &spaces[tau - 1])?.sqrt();
    }
    Ok(total / (g.len() - 1) as f64)
}

/// Per-node objective of row `u` with `z_u` substituted for `Z(u)`:
///
/// `sum_{v in N(u)} (G(u,v) - z_u.Z(v))^2 + sum_{v not in N(u), v != u} (z_u.Z(v))^2
///  + lambda (1 - z_u.next) + lambda (1 - z_u.prev)`
///
/// Missing temporal neighbors drop their term.
#[allow(clippy::too_many_arguments)]
pub fn dense_node_objective(
    g: &GraphSnapshot,
    z: &LatentSpace,
    u: usize,
    z_u: &[f64],
    prev_row: Option<&[f64]>,
    next_row: Option<&[f64]>,
    lambda: f64,
) -> Result<f64> {
    refuse_large(g.n())?;
    let a = dense_adjacency(g);
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
    let mut total = 0.0;
    for v in 0..g.n() {
        if v == u {
            continue;
        }
        let d = a[u][v] - dot(z_u, z.row(v));
        total += d * d;
    }
    if let Some(p) = prev_row {
        total += lambda * (1.0 - dot(z_u, p));
    }
    if let Some(q) = next_row {
        total += lambda * (1.0 - dot(z_u, q));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refuses_large_graphs() {
        let g = GraphSnapshot::empty(65);
        let z = LatentSpace::uniform(65, 2);
        assert!(matches!(dense_residual(&g, &z), Err(Error::Refused(_))));
    }

    #[test]
    fn matches_hand_examples() {
        let g = DynamicGraph::new(vec![GraphSnapshot::from_edges(2, [(0, 1, 1.0)]).unwrap()]).unwrap();
        let same = LatentSpace::from_rows(2, 2, vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let orth = LatentSpace::from_rows(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(dense_objective_oracle(&g, &[same], 0.0).unwrap(), 0.0);
        assert_eq!(dense_objective_oracle(&g, &[orth], 0.0).unwrap(), 2.0);
    }
}
