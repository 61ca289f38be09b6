use crate::error::{Error, Result};
use crate::graph::snapshot::GraphSnapshot;

/// Row-level change set between two consecutive snapshots.
///
/// Node arrivals and departures show up as rows moving from or to empty, so
/// the four kinds of change (node add/remove, edge add/remove) all reduce to
/// the edge lists below.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DeltaGraph {
    /// Nodes whose neighbor row differs, ascending.
    pub changed_nodes: Vec<usize>,
    /// `(u, v, w)` with `u < v`.
    pub added_edges: Vec<(usize, usize, f64)>,
    pub removed_edges: Vec<(usize, usize, f64)>,
    /// `(u, v, old, new)` with `u < v`.
    pub weight_changed_edges: Vec<(usize, usize, f64, f64)>,
}

impl DeltaGraph {
    pub fn is_empty(&self) -> bool {
        self.changed_nodes.is_empty()
    }

    pub fn edge_change_count(&self) -> usize {
        self.added_edges.len() + self.removed_edges.len() + self.weight_changed_edges.len()
    }

    /// Reconstructs the next snapshot from the previous one.
    pub fn apply(&self, prev: &GraphSnapshot) -> Result<GraphSnapshot> {
        let mut edges: Vec<(usize, usize, f64)> = prev.edges().collect();
        let mut removed: Vec<(usize, usize)> =
            self.removed_edges.iter().map(|&(u, v, _)| (u, v)).collect();
        removed.sort_unstable();
        let mut reweighted: Vec<(usize, usize, f64)> = self
            .weight_changed_edges
            .iter()
            .map(|&(u, v, _, w)| (u, v, w))
            .collect();
        reweighted.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        edges.retain(|&(u, v, _)| removed.binary_search(&(u, v)).is_err());
        for e in edges.iter_mut() {
            if let Ok(i) = reweighted.binary_search_by(|r| (r.0, r.1).cmp(&(e.0, e.1))) {
                e.2 = reweighted[i].2;
            }
        }
        edges.extend(self.added_edges.iter().copied());
        GraphSnapshot::from_edges(prev.n(), edges)
    }
}

/// Computes the row-level difference `prev -> next`.
pub fn diff_snapshots(prev: &GraphSnapshot, next: &GraphSnapshot) -> Result<DeltaGraph> {
    if prev.n() != next.n() {
        return Err(Error::contract(format!(
            "snapshot sizes differ: {} vs {}",
            prev.n(),
            next.n()
        )));
    }
    let mut delta = DeltaGraph::default();
    for u in 0..prev.n() {
        let (a_ids, a_w) = (prev.neighbor_ids(u), prev.neighbor_weights(u));
        let (b_ids, b_w) = (next.neighbor_ids(u), next.neighbor_weights(u));
        if a_ids == b_ids && a_w == b_w {
            continue;
        }
        delta.changed_nodes.push(u);

        // merge walk; only u < v is recorded so each edge appears once
        let (mut i, mut j) = (0, 0);
        while i < a_ids.len() || j < b_ids.len() {
            let a = a_ids.get(i).map(|&x| x as usize);
            let b = b_ids.get(j).map(|&x| x as usize);
            match (a, b) {
                (Some(x), Some(y)) if x == y => {
                    if x > u && a_w[i] != b_w[j] {
                        delta.weight_changed_edges.push((u, x, a_w[i], b_w[j]));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    if x > u {
                        delta.removed_edges.push((u, x, a_w[i]));
                    }
                    i += 1;
                }
                (Some(x), None) => {
                    if x > u {
                        delta.removed_edges.push((u, x, a_w[i]));
                    }
                    i += 1;
                }
                (_, Some(y)) => {
                    if y > u {
                        delta.added_edges.push((u, y, b_w[j]));
                    }
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
    }
    Ok(delta)
}
