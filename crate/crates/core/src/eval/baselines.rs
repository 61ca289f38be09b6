use crate::graph::GraphSnapshot;

/// `sum_{w in N(u) ∩ N(v)} 1 / ln d(w)` on the aggregate training graph.
/// Common neighbors of degree 1 (only possible when `u == v`) are skipped.
pub fn adamic_adar(agg: &GraphSnapshot, u: usize, v: usize) -> f64 {
    let (a, b) = (agg.neighbor_ids(u), agg.neighbor_ids(v));
    let (mut i, mut j) = (0, 0);
    let mut score = 0.0;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let d = agg.degree(a[i] as usize);
                if d > 1 {
                    score += 1.0 / (d as f64).ln();
                }
                i += 1;
                j += 1;
            }
        }
    }
    score
}

/// Predicts with the last observed snapshot: the stored weight when
/// `weighted`, otherwise 1 for an edge and 0 for a non-edge.
pub fn previous_graph_baseline(g: &GraphSnapshot, u: usize, v: usize, weighted: bool) -> f64 {
    match (g.has_edge(u, v), weighted) {
        (false, _) => 0.0,
        (true, false) => 1.0,
        (true, true) => g.weight(u, v),
    }
}
