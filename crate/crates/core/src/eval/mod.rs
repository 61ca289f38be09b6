//! Link scoring, test-pair sampling, ranking metrics and baselines.

mod baselines;
mod metrics;
mod pairs;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DynamicGraph;
use crate::latent::{dot, residual, LatentSpace, Trajectory};

pub use baselines::{adamic_adar, previous_graph_baseline};
pub use metrics::{auc_pr, auc_roc, auc_roc_pairwise};
pub use pairs::{sample_test_pairs, LabeledPair, NegativeComposition, PairMode, PairSampling, TestPairSet};

/// Predicted link strength `Z(u).Z(v)`.
pub fn score_pair(z: &LatentSpace, u: usize, v: usize) -> Result<f64> {
    if u == v {
        return Err(Error::contract(format!("self pair ({u}, {u}) has no score")));
    }
    let n = z.n();
    if u >= n || v >= n {
        return Err(Error::contract(format!("pair ({u}, {v}) out of range for {n} nodes")));
    }
    Ok(dot(z.row(u), z.row(v)))
}

/// Scores every pair with `f`, in parallel, preserving order.
pub fn score_pairs<F>(pairs: &TestPairSet, f: F) -> Vec<f64>
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    pairs.pairs.par_iter().map(|p| f(p.u, p.v)).collect()
}

/// `(1/(t-1)) sum_{tau>=2} ||G_tau - Z_{tau-1} Z_{tau-1}^T||_F` over
/// off-diagonal entries.
pub fn prediction_error(g: &DynamicGraph, traj: &Trajectory) -> Result<f64> {
    if traj.len() != g.len() {
        return Err(Error::dimension(format!(
            "{} snapshots but {} latent spaces",
            g.len(),
            traj.len()
        )));
    }
    prediction_error_spaces(g, &traj.spaces)
}

/// Same as [`prediction_error`] but only `Z_1..Z_{t-1}` are needed, so the
/// last snapshot of `g` may be a held-out one.
pub fn prediction_error_spaces(g: &DynamicGraph, spaces: &[LatentSpace]) -> Result<f64> {
    let t = g.len();
    if t < 2 {
        return Err(Error::contract("prediction error needs at least two snapshots"));
    }
    if spaces.len() + 1 < t {
        return Err(Error::dimension(format!("{t} snapshots need at least {} spaces", t - 1)));
    }
    let mut total = 0.0;
    for tau in 1..t {
        total += residual(g.snapshot(tau), &spaces[tau - 1])?.sqrt();
    }
    Ok(total / (t - 1) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub name: String,
    pub auc_roc: f64,
    pub auc_pr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSummary {
    pub mode: PairMode,
    pub seed: u64,
    pub linked: usize,
    pub non_linked: usize,
    pub negatives: NegativeComposition,
}

impl PairSummary {
    pub fn of(pairs: &TestPairSet) -> Self {
        let linked = pairs.linked_count();
        PairSummary {
            mode: pairs.mode,
            seed: pairs.seed,
            linked,
            non_linked: pairs.len() - linked,
            negatives: pairs.negatives,
        }
    }
}

/// Result of one evaluation run, serialized as a single JSON object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub auc_roc: f64,
    pub auc_pr: f64,
    pub prediction_error: f64,
    pub pairs: PairSummary,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub baseline: Option<BaselineReport>,
    /// Milliseconds per phase.
    pub timings: BTreeMap<String, f64>,
    pub config: serde_json::Value,
}

impl EvalReport {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.auc_roc) || !unit(self.auc_pr) {
            return Err(Error::Numerical("AUC outside [0, 1]".into()));
        }
        if let Some(b) = &self.baseline {
            if !unit(b.auc_roc) || !unit(b.auc_pr) {
                return Err(Error::Numerical("baseline AUC outside [0, 1]".into()));
            }
        }
        if !(self.prediction_error >= 0.0) {
            return Err(Error::Numerical("prediction error must be nonnegative".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSnapshot;

    #[test]
    fn score_examples() {
        let z = LatentSpace::from_rows(3, 2, vec![0.6, 0.8, 0.8, 0.6, 1.0, 0.0]).unwrap();
        assert!((score_pair(&z, 0, 1).unwrap() - 0.96).abs() < 1e-15);
        assert_eq!(score_pair(&z, 0, 1).unwrap(), score_pair(&z, 1, 0).unwrap());
        assert!(score_pair(&z, 1, 1).is_err());
        let same = LatentSpace::from_rows(2, 2, vec![0.6, 0.8, 0.6, 0.8]).unwrap();
        assert!((score_pair(&same, 0, 1).unwrap() - 1.0).abs() < 1e-15);
        let orth = LatentSpace::from_rows(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(score_pair(&orth, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn prediction_error_examples() {
        let e = GraphSnapshot::from_edges(2, [(0, 1, 1.0)]).unwrap();
        let g = DynamicGraph::new(vec![e.clone(), e]).unwrap();
        let orth = LatentSpace::from_rows(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let err = prediction_error_spaces(&g, &[orth.clone(), orth]).unwrap();
        assert!((err - 2f64.sqrt()).abs() < 1e-12);
        let same = LatentSpace::from_rows(2, 2, vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(prediction_error_spaces(&g, &[same]).unwrap(), 0.0);
        let one = DynamicGraph::new(vec![GraphSnapshot::empty(2)]).unwrap();
        assert!(prediction_error_spaces(&one, &[LatentSpace::uniform(2, 2)]).is_err());
    }
}
