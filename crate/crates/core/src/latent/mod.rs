//! Latent-space types and the numerical kernels shared by the solvers.

pub mod kernels;
pub mod objective;
pub mod oracle;
mod schedule;
mod space;

pub use kernels::{
    dot, gradient_at, gradient_node, gram, gram_row_swap, lipschitz_constant, neighbor_sum,
    row_normalize, Gram, ZERO_NORM,
};
pub use objective::{local_objective, objective, residual, smoothness};
pub use oracle::dense_objective_oracle;
pub use schedule::{nesterov_a, step_coefficient, StepSchedule};
pub use space::{AffectedStats, LatentSpace, Trajectory, WorkCounters, UNIT_NORM_TOL};
