//! Temporal latent spaces for dynamic graphs.
//!
//! Each snapshot `G_tau` of an undirected graph gets a nonnegative embedding
//! `Z_tau` with unit rows, fitted so that `Z_tau Z_tau^T` reconstructs the
//! off-diagonal adjacency while rows move little between snapshots. The
//! score `Z_t(u).Z_t(v)` then predicts links at `t + 1`.
//!
//! Three solvers share one row-update kernel: [`solver::fit_global`]
//! optimizes all snapshots jointly, [`solver::fit_local`] one snapshot at a
//! time, and [`solver::fit_incremental`] only the nodes touched by each
//! snapshot's changes.

pub mod error;
pub mod eval;
pub mod graph;
pub mod harness;
pub mod latent;
pub mod solver;

pub use error::{Error, Result};
pub use graph::{DynamicGraph, GraphSnapshot};
pub use latent::{LatentSpace, Trajectory};
pub use solver::{fit, Algorithm, SolverConfig};
