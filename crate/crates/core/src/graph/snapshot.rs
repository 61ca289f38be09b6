use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Sparse symmetric adjacency of one time slice in CSR layout.
///
/// Each node's neighbor list is sorted ascending, every undirected edge is
/// stored in both rows with the same positive weight, and there is no
/// diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphSnapshot {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
}

impl GraphSnapshot {
    pub fn empty(n: usize) -> Self {
        GraphSnapshot {
            n,
            offsets: vec![0; n + 1],
            targets: Vec::new(),
            weights: Vec::new(),
        }
    }

    /// Builds a snapshot from undirected edges. Repeated pairs (in either
    /// orientation) are summed.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n > u32::MAX as usize {
            return Err(Error::contract("node count exceeds u32 range"));
        }
        let mut pairs: Vec<(u32, u32, f64)> = Vec::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::contract(format!("edge ({u},{v}) outside [0,{n})")));
            }
            if u == v {
                return Err(Error::contract(format!("self-loop on node {u}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::contract(format!("edge ({u},{v}) has weight {w}")));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            pairs.push((a as u32, b as u32, w));
        }
        // stable sort and a single summation per pair keep both orientations bitwise equal
        pairs.sort_by_key(|p| (p.0, p.1));
        let mut merged: Vec<(u32, u32, f64)> = Vec::with_capacity(2 * pairs.len());
        for (u, v, w) in pairs {
            match merged.last_mut() {
                Some(last) if (last.0, last.1) == (u, v) => last.2 += w,
                _ => merged.push((u, v, w)),
            }
        }
        let half = merged.len();
        for i in 0..half {
            let (u, v, w) = merged[i];
            merged.push((v, u, w));
        }
        merged.sort_unstable_by_key(|p| (p.0, p.1));

        let mut offsets = vec![0usize; n + 1];
        let mut targets = Vec::with_capacity(merged.len());
        let mut weights: Vec<f64> = Vec::with_capacity(merged.len());
        for (u, v, w) in merged {
            offsets[u as usize + 1] += 1;
            targets.push(v);
            weights.push(w);
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        targets.shrink_to_fit();
        weights.shrink_to_fit();
        Ok(GraphSnapshot {
            n,
            offsets,
            targets,
            weights,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Distinct undirected edge count.
    #[inline]
    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    #[inline]
    pub fn neighbor_ids(&self, u: usize) -> &[u32] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn neighbor_weights(&self, u: usize) -> &[f64] {
        &self.weights[self.offsets[u]..self.offsets[u + 1]]
    }

    /// `(v, G(u,v))` for every neighbor of `u`, ascending in `v`.
    #[inline]
    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.neighbor_ids(u)
            .iter()
            .zip(self.neighbor_weights(u))
            .map(|(&v, &w)| (v as usize, w))
    }

    /// `G(u,v)`, zero when absent.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        let ids = self.neighbor_ids(u);
        match ids.binary_search(&(v as u32)) {
            Ok(i) => self.neighbor_weights(u)[i],
            Err(_) => 0.0,
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbor_ids(u).binary_search(&(v as u32)).is_ok()
    }

    /// Undirected edges with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| v > u)
                .map(move |(v, w)| (u, v, w))
        })
    }

    /// Sum of weights over undirected edges.
    pub fn total_weight(&self) -> f64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    /// Sum of squared entries over the full symmetric matrix (both orientations).
    pub fn squared_frobenius(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum()
    }

    /// Every weight replaced by 1.
    pub fn binarized(&self) -> Self {
        GraphSnapshot {
            weights: vec![1.0; self.weights.len()],
            ..self.clone()
        }
    }

    /// Heap bytes held by the adjacency arrays.
    pub fn heap_bytes(&self) -> usize {
        self.offsets.capacity() * std::mem::size_of::<usize>()
            + self.targets.capacity() * std::mem::size_of::<u32>()
            + self.weights.capacity() * std::mem::size_of::<f64>()
    }

    /// Checks the symmetry, ordering, diagonal and weight invariants.
    pub fn validate(&self) -> Result<()> {
        if self.offsets.len() != self.n + 1 || self.offsets[self.n] != self.targets.len() {
            return Err(Error::contract("malformed offsets"));
        }
        for u in 0..self.n {
            let ids = self.neighbor_ids(u);
            if ids.windows(2).any(|p| p[0] >= p[1]) {
                return Err(Error::contract(format!("row {u} not strictly sorted")));
            }
            for (v, w) in self.neighbors(u) {
                if v == u {
                    return Err(Error::contract(format!("diagonal entry at {u}")));
                }
                if !(w > 0.0) {
                    return Err(Error::contract(format!("non-positive weight at ({u},{v})")));
                }
                if self.weight(v, u) != w {
                    return Err(Error::contract(format!("asymmetric entry ({u},{v})")));
                }
            }
        }
        Ok(())
    }

    /// Writes the snapshot as an edge list headed by `# snapshot tau n m`.
    /// Each edge line is `u v tau w`.
    pub fn write_edge_list<W: Write>(&self, mut out: W, tau: usize) -> std::io::Result<()> {
        writeln!(out, "# snapshot {tau} {} {}", self.n, self.m())?;
        for (u, v, w) in self.edges() {
            writeln!(out, "{u} {v} {tau} {w}")?;
        }
        Ok(())
    }

    /// Reads a file written by [`GraphSnapshot::write_edge_list`].
    /// Returns the snapshot index from the header alongside the snapshot.
    pub fn read_edge_list<R: BufRead>(input: R) -> Result<(usize, Self)> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut edges = Vec::new();
        for (idx, line) in input.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('#') {
                let f: Vec<&str> = rest.split_whitespace().collect();
                if f.first() == Some(&"snapshot") && header.is_none() {
                    let parse = |s: Option<&&str>| s.and_then(|s| s.parse::<usize>().ok());
                    match (parse(f.get(1)), parse(f.get(2)), parse(f.get(3))) {
                        (Some(t), Some(n), Some(m)) => header = Some((t, n, m)),
                        _ => {
                            return Err(Error::Parse {
                                line: lineno,
                                msg: "malformed `# snapshot tau n m` header".into(),
                            })
                        }
                    }
                }
                continue;
            }
            let f: Vec<&str> = trimmed.split_whitespace().collect();
            let parsed = (|| {
                let u: usize = f.first()?.parse().ok()?;
                let v: usize = f.get(1)?.parse().ok()?;
                let w: f64 = match f.get(3) {
                    Some(s) => s.parse().ok()?,
                    None => 1.0,
                };
                (f.len() >= 3 && f.len() <= 4).then_some((u, v, w))
            })();
            match parsed {
                Some(e) => edges.push(e),
                None => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("expected `u v tau w`, got `{trimmed}`"),
                    })
                }
            }
        }
        let (tau, n, m) = header.ok_or(Error::Parse {
            line: 1,
            msg: "missing `# snapshot tau n m` header".into(),
        })?;
        let snap = GraphSnapshot::from_edges(n, edges)?;
        if snap.m() != m {
            return Err(Error::contract(format!(
                "header declares {m} edges, found {}",
                snap.m()
            )));
        }
        Ok((tau, snap))
    }
}
