//! Sparse evaluation of the reconstruction-plus-smoothness objective.
//!
//! The off-diagonal residual uses
//! `||G - Z Z^T||_F^2 = ||G||_F^2 - 2 sum_{(u,v) in E} G(u,v) Z(u).Z(v) + ||Z^T Z||_F^2 - sum_u ||Z(u)||^4`
//! (both orientations of every edge counted), so no `n x n` matrix is ever
//! formed.

use crate::error::{Error, Result};
use crate::graph::{DynamicGraph, GraphSnapshot};
use crate::latent::kernels::{dot, Gram};
use crate::latent::space::LatentSpace;

fn check_shape(g: &GraphSnapshot, z: &LatentSpace) -> Result<()> {
    if g.n() != z.n() {
        return Err(Error::dimension(format!(
            "graph has {} nodes, latent space {}",
            g.n(),
            z.n()
        )));
    }
    Ok(())
}

/// `||G - Z Z^T||_F^2` over off-diagonal entries, with `gram = Z^T Z`.
pub fn residual_with_gram(g: &GraphSnapshot, z: &LatentSpace, gram: &Gram) -> f64 {
    let mut cross = 0.0;
    for u in 0..g.n() {
        let zu = z.row(u);
        for (v, w) in g.neighbors(u) {
            cross += w * dot(zu, z.row(v));
        }
    }
    let diag: f64 = z
        .rows()
        .map(|r| {
            let s = dot(r, r);
            s * s
        })
        .sum();
    let value = g.squared_frobenius() - 2.0 * cross + gram.squared_frobenius() - diag;
    // exact arithmetic gives a sum of squares; clamp rounding residue
    value.max(0.0)
}

/// `||G - Z Z^T||_F^2` over off-diagonal entries.
pub fn residual(g: &GraphSnapshot, z: &LatentSpace) -> Result<f64> {
    check_shape(g, z)?;
    let mut gram = Gram::zeros(z.k());
    gram.recompute(z);
    Ok(residual_with_gram(g, z, &gram))
}

/// `sum_u (1 - Z(u).Z_prev(u))`.
pub fn smoothness(z: &LatentSpace, z_prev: &LatentSpace) -> Result<f64> {
    if z.n() != z_prev.n() || z.k() != z_prev.k() {
        return Err(Error::dimension("consecutive spaces differ in shape"));
    }
    Ok(z.rows().zip(z_prev.rows()).map(|(a, b)| 1.0 - dot(a, b)).sum())
}

/// Whole-trajectory objective: residual of every snapshot plus `lambda`
/// times the smoothness between consecutive spaces.
pub fn objective(g: &DynamicGraph, spaces: &[LatentSpace], lambda: f64) -> Result<f64> {
    if spaces.len() != g.len() {
        return Err(Error::dimension(format!(
            "{} snapshots but {} latent spaces",
            g.len(),
            spaces.len()
        )));
    }
    let mut total = 0.0;
    for (tau, (snap, z)) in g.snapshots().iter().zip(spaces).enumerate() {
        total += residual(snap, z)?;
        if tau > 0 {
            total += lambda * smoothness(z, &spaces[tau - 1])?;
        }
    }
    Ok(total)
}

/// Single-snapshot objective with only the backward smoothness term.
pub fn local_objective(
    g: &GraphSnapshot,
    z: &LatentSpace,
    z_prev: Option<&LatentSpace>,
    lambda: f64,
) -> Result<f64> {
    let mut value = residual(g, z)?;
    if let Some(prev) = z_prev {
        value += lambda * smoothness(z, prev)?;
    }
    Ok(value)
}

pub(crate) fn local_objective_with_gram(
    g: &GraphSnapshot,
    z: &LatentSpace,
    gram: &Gram,
    z_prev: Option<&LatentSpace>,
    lambda: f64,
) -> f64 {
    let mut value = residual_with_gram(g, z, gram);
    if let Some(prev) = z_prev {
        value += lambda * z.rows().zip(prev.rows()).map(|(a, b)| 1.0 - dot(a, b)).sum::<f64>();
    }
    value
}
