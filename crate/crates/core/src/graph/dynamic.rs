use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::edges::TemporalEdgeList;
use crate::graph::snapshot::GraphSnapshot;

/// Ordered snapshots over a shared node universe.
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicGraph {
    snapshots: Vec<GraphSnapshot>,
}

impl DynamicGraph {
    pub fn new(snapshots: Vec<GraphSnapshot>) -> Result<Self> {
        let first = snapshots
            .first()
            .ok_or_else(|| Error::contract("a dynamic graph needs at least one snapshot"))?;
        let n = first.n();
        if let Some((i, s)) = snapshots.iter().enumerate().find(|(_, s)| s.n() != n) {
            return Err(Error::contract(format!(
                "snapshot {i} has {} nodes, expected {n}",
                s.n()
            )));
        }
        Ok(DynamicGraph { snapshots })
    }

    pub fn n(&self) -> usize {
        self.snapshots[0].n()
    }

    /// Number of snapshots.
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn snapshot(&self, tau: usize) -> &GraphSnapshot {
        &self.snapshots[tau]
    }

    pub fn snapshots(&self) -> &[GraphSnapshot] {
        &self.snapshots
    }

    pub fn into_snapshots(self) -> Vec<GraphSnapshot> {
        self.snapshots
    }

    /// Leading `count` snapshots.
    pub fn prefix(&self, count: usize) -> Result<Self> {
        if count == 0 || count > self.len() {
            return Err(Error::contract(format!(
                "prefix of {count} from {} snapshots",
                self.len()
            )));
        }
        Ok(DynamicGraph {
            snapshots: self.snapshots[..count].to_vec(),
        })
    }

    /// Union of all snapshots with summed weights.
    pub fn aggregate(&self) -> GraphSnapshot {
        let edges = self.snapshots.iter().flat_map(|s| s.edges());
        GraphSnapshot::from_edges(self.n(), edges).expect("snapshots already validated")
    }

    pub fn total_edges(&self) -> usize {
        self.snapshots.iter().map(GraphSnapshot::m).sum()
    }
}

/// Interval boundaries for slicing.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundaries {
    /// `count` equal intervals spanning the observed timestamp range.
    Equal(usize),
    /// Explicit cut points `b_0 < b_1 < ... < b_T`.
    Cuts(Vec<f64>),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SliceStats {
    /// Indices of snapshots that received no records.
    pub empty_snapshots: Vec<usize>,
    /// Records outside `[b_0, b_T]`.
    pub out_of_range: usize,
}

/// Resolves boundaries to explicit cut points given the data.
fn cut_points(edges: &TemporalEdgeList, boundaries: &Boundaries) -> Result<Vec<f64>> {
    match boundaries {
        Boundaries::Equal(0) => Err(Error::contract("at least one snapshot is required")),
        Boundaries::Equal(count) => {
            let (lo, hi) = edges
                .records
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                    (lo.min(r.t), hi.max(r.t))
                });
            let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 0.0) };
            let width = (hi - lo) / *count as f64;
            let mut cuts: Vec<f64> = (0..=*count).map(|i| lo + width * i as f64).collect();
            // float rounding must never push the maximum outside the last interval
            cuts[*count] = hi;
            Ok(cuts)
        }
        Boundaries::Cuts(cuts) => {
            if cuts.len() < 2 {
                return Err(Error::contract("explicit boundaries need at least two cut points"));
            }
            if cuts.iter().any(|c| !c.is_finite()) || cuts.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::contract("cut points must be finite and strictly increasing"));
            }
            Ok(cuts.clone())
        }
    }
}

/// Slices interactions into snapshots.
///
/// Snapshot `i` (0-based) covers `(b_i, b_{i+1}]`, with the first interval
/// also closed on the left. Repeated interactions inside one interval are
/// summed; `binarize` then maps every weight to 1.
pub fn slice_snapshots(
    edges: &TemporalEdgeList,
    boundaries: &Boundaries,
    binarize: bool,
) -> Result<(DynamicGraph, SliceStats)> {
    let cuts = cut_points(edges, boundaries)?;
    let count = cuts.len() - 1;
    let mut buckets: Vec<HashMap<(usize, usize), f64>> = vec![HashMap::new(); count];
    let mut stats = SliceStats::default();

    for r in &edges.records {
        if !r.t.is_finite() {
            return Err(Error::contract("non-finite timestamp"));
        }
        if r.t < cuts[0] || r.t > cuts[count] {
            stats.out_of_range += 1;
            continue;
        }
        // first b_i with t <= b_i, i >= 1
        let idx = cuts[1..].partition_point(|&b| b < r.t);
        let key = if r.u < r.v { (r.u, r.v) } else { (r.v, r.u) };
        *buckets[idx.min(count - 1)].entry(key).or_insert(0.0) += r.w;
    }

    let mut snapshots = Vec::with_capacity(count);
    for (i, bucket) in buckets.into_iter().enumerate() {
        if bucket.is_empty() {
            stats.empty_snapshots.push(i);
        }
        let mut list: Vec<(usize, usize, f64)> = bucket
            .into_iter()
            .map(|((u, v), w)| (u, v, if binarize { 1.0 } else { w }))
            .collect();
        list.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        snapshots.push(GraphSnapshot::from_edges(edges.node_count, list)?);
    }
    if !stats.empty_snapshots.is_empty() {
        log::warn!(
            "{} of {count} snapshot(s) are empty: {:?}",
            stats.empty_snapshots.len(),
            stats.empty_snapshots
        );
    }
    if stats.out_of_range > 0 {
        log::warn!("{} record(s) fall outside the boundaries", stats.out_of_range);
    }
    Ok((DynamicGraph::new(snapshots)?, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::edges::{load_temporal_edges, EdgeListFormat, TemporalEdge};
    use proptest::prelude::*;

    fn load(s: &str) -> TemporalEdgeList {
        load_temporal_edges(s.as_bytes(), EdgeListFormat::default()).unwrap()
    }

    #[test]
    fn interval_membership() {
        let edges = load("0 1 0.5\n1 2 1.5\n");
        let (g, stats) =
            slice_snapshots(&edges, &Boundaries::Cuts(vec![0.0, 1.0, 2.0]), false).unwrap();
        assert_eq!(g.len(), 2);
        assert!(stats.empty_snapshots.is_empty());
        assert!(g.snapshot(0).has_edge(0, 1) && g.snapshot(0).m() == 1);
        assert!(g.snapshot(1).has_edge(1, 2) && g.snapshot(1).m() == 1);

        let (g, _) = slice_snapshots(&edges, &Boundaries::Equal(2), false).unwrap();
        assert!(g.snapshot(0).has_edge(0, 1) && g.snapshot(0).m() == 1);
        assert!(g.snapshot(1).has_edge(1, 2) && g.snapshot(1).m() == 1);
    }

    #[test]
    fn right_closed_intervals() {
        let edges = load("0 1 0\n0 1 1\n1 2 1.0001\n");
        let (g, _) = slice_snapshots(&edges, &Boundaries::Cuts(vec![0.0, 1.0, 2.0]), false).unwrap();
        assert_eq!(g.snapshot(0).weight(0, 1), 2.0);
        assert_eq!(g.snapshot(1).m(), 1);
    }

    #[test]
    fn duplicates_aggregate_or_binarize() {
        let edges = load("0 1 0.1\n1 0 0.2\n");
        let (g, _) = slice_snapshots(&edges, &Boundaries::Equal(1), false).unwrap();
        assert_eq!(g.snapshot(0).weight(0, 1), 2.0);
        let (g, _) = slice_snapshots(&edges, &Boundaries::Equal(1), true).unwrap();
        assert_eq!(g.snapshot(0).weight(0, 1), 1.0);
    }

    #[test]
    fn too_many_snapshots_allowed_with_empties() {
        let edges = load("0 1 0\n1 2 0\n");
        let (g, stats) = slice_snapshots(&edges, &Boundaries::Equal(3), false).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(stats.empty_snapshots, vec![1, 2]);
        assert!(g.snapshots().iter().all(|s| s.n() == 3));
    }

    #[test]
    fn cut_validation() {
        let edges = load("0 1 0\n");
        assert!(slice_snapshots(&edges, &Boundaries::Cuts(vec![1.0]), false).is_err());
        assert!(slice_snapshots(&edges, &Boundaries::Cuts(vec![1.0, 0.0]), false).is_err());
        assert!(slice_snapshots(&edges, &Boundaries::Equal(0), false).is_err());
    }

    proptest! {
        #[test]
        fn slicing_preserves_volume(
            raw in proptest::collection::vec((0usize..8, 0usize..8, 0.0f64..10.0, 0.5f64..3.0), 1..60),
            count in 1usize..6,
        ) {
            let records: Vec<TemporalEdge> = raw
                .into_iter()
                .filter(|(u, v, _, _)| u != v)
                .map(|(u, v, t, w)| TemporalEdge { u, v, t, w })
                .collect();
            prop_assume!(!records.is_empty());
            let list = TemporalEdgeList::from_records(8, records).unwrap();
            let (g, stats) = slice_snapshots(&list, &Boundaries::Equal(count), false).unwrap();
            prop_assert_eq!(stats.out_of_range, 0);
            let volume: f64 = g.snapshots().iter().map(GraphSnapshot::total_weight).sum();
            prop_assert!((volume - list.total_weight()).abs() < 1e-9);
            for s in g.snapshots() {
                s.validate().unwrap();
            }
        }
    }
}
