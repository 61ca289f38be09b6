//! Block-coordinate solvers: joint (global), sequential (local) and
//! change-driven (incremental).

mod global;
mod incremental;
mod local;
mod update;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DynamicGraph;
use crate::latent::Trajectory;

pub use global::fit_global;
pub use incremental::{
    fit_incremental, init_updated_rows, refresh_affected_set, AffectedSet,
};
pub use local::{fit_local, fit_local_streaming, LocalFitSummary};
pub use update::{color_classes, update_row_global, update_row_local, Schedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Global,
    Local,
    Incremental,
}

impl Algorithm {
    /// Temporal smoothness weight used when none is given.
    pub fn default_lambda(self) -> f64 {
        match self {
            Algorithm::Global => 1e-4,
            Algorithm::Local | Algorithm::Incremental => 1e-2,
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(Algorithm::Global),
            "local" => Ok(Algorithm::Local),
            "incremental" => Ok(Algorithm::Incremental),
            other => Err(Error::contract(format!(
                "unknown algorithm `{other}` (expected global, local or incremental)"
            ))),
        }
    }
}

/// Logarithm used in the default score-movement threshold.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

/// What the affected-set refresh compares the current rows against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AffectedBaseline {
    /// Rows as they were before the latest inner iteration.
    #[default]
    PreviousIterate,
    /// Rows of the previous snapshot's space.
    PreviousSnapshot,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub k: usize,
    pub lambda: f64,
    /// Cap on sweeps (global) or inner iterations per snapshot.
    pub max_iters: usize,
    /// Stop once the relative objective change between sweeps is below this.
    pub tol: f64,
    pub seed: u64,
    /// Score-movement threshold of the incremental solver; derived from `n`
    /// when absent.
    pub zeta: Option<f64>,
    /// Per-coordinate movement threshold; `2 zeta / k` when absent.
    pub delta: Option<f64>,
    pub zeta_log: LogBase,
    pub affected_baseline: AffectedBaseline,
    /// Whether snapshots were binarized at slicing time (echoed only).
    pub binarize: bool,
    pub threads: usize,
    pub schedule: Schedule,
    /// Keep every `Z_tau`; otherwise the local solver retains only the last.
    pub keep_spaces: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            k: 20,
            lambda: Algorithm::Local.default_lambda(),
            max_iters: 100,
            tol: 1e-4,
            seed: 0,
            zeta: None,
            delta: None,
            zeta_log: LogBase::Natural,
            affected_baseline: AffectedBaseline::PreviousIterate,
            binarize: true,
            threads: 1,
            schedule: Schedule::Auto,
            keep_spaces: true,
        }
    }
}

impl SolverConfig {
    pub fn for_algorithm(algo: Algorithm) -> Self {
        SolverConfig {
            lambda: algo.default_lambda(),
            ..SolverConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::contract("k must be at least 1"));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::contract("lambda must be finite and nonnegative"));
        }
        if self.max_iters == 0 {
            return Err(Error::contract("max_iters must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::contract("tol must be positive"));
        }
        if self.threads == 0 {
            return Err(Error::contract("threads must be at least 1"));
        }
        for (name, v) in [("zeta", self.zeta), ("delta", self.delta)] {
            if let Some(v) = v {
                if !(v >= 0.0) {
                    return Err(Error::contract(format!("{name} must be nonnegative")));
                }
            }
        }
        Ok(())
    }

    /// `(zeta, delta)` for a graph of `n` nodes.
    pub fn thresholds(&self, n: usize) -> (f64, f64) {
        let zeta = self.zeta.unwrap_or_else(|| default_zeta(n, self.zeta_log));
        let delta = self.delta.unwrap_or(2.0 * zeta / self.k as f64);
        (zeta, delta)
    }

    pub(crate) fn thread_pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| Error::contract(format!("thread pool: {e}")))
    }
}

/// `sqrt(-log(1 - 1/n))`.
pub fn default_zeta(n: usize, base: LogBase) -> f64 {
    let x = -(1.0 - 1.0 / n as f64).ln();
    let x = match base {
        LogBase::Natural => x,
        LogBase::Two => x / std::f64::consts::LN_2,
        LogBase::Ten => x / std::f64::consts::LN_10,
    };
    x.sqrt()
}

/// Dispatches to the chosen solver.
pub fn fit(g: &DynamicGraph, algo: Algorithm, cfg: &SolverConfig) -> Result<Trajectory> {
    match algo {
        Algorithm::Global => fit_global(g, cfg),
        Algorithm::Local => fit_local(g, cfg),
        Algorithm::Incremental => fit_incremental(g, cfg),
    }
}

pub(crate) fn check_graph(g: &DynamicGraph, cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    if g.n() < 2 {
        return Err(Error::contract("at least two nodes are required"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_default_for_hundred_nodes() {
        let z = default_zeta(100, LogBase::Natural);
        assert!((z - 0.100251).abs() < 1e-6);
        let cfg = SolverConfig::default();
        let (zeta, delta) = cfg.thresholds(100);
        assert_eq!(zeta, z);
        assert!((delta - 0.0100251).abs() < 1e-7);
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        for bad in [
            SolverConfig { k: 0, ..Default::default() },
            SolverConfig { lambda: -1.0, ..Default::default() },
            SolverConfig { max_iters: 0, ..Default::default() },
            SolverConfig { tol: 0.0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
        assert_eq!(SolverConfig::for_algorithm(Algorithm::Global).lambda, 1e-4);
        assert_eq!(SolverConfig::for_algorithm(Algorithm::Local).lambda, 1e-2);
        assert!("bogus".parse::<Algorithm>().is_err());
    }
}
