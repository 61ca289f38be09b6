use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// One timestamped interaction between two distinct nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TemporalEdge {
    pub u: usize,
    pub v: usize,
    pub t: f64,
    pub w: f64,
}

/// How node identifiers in an edge-list stream are interpreted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdMode {
    /// Arbitrary tokens, remapped to dense ids in order of first appearance.
    Remap,
    /// Non-negative integers used as-is; `node_count` is `max id + 1`.
    Dense,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeListFormat {
    pub ids: IdMode,
}

impl Default for EdgeListFormat {
    fn default() -> Self {
        EdgeListFormat { ids: IdMode::Remap }
    }
}

/// Parsed interaction log with dense node ids.
#[derive(Clone, Debug, Default)]
pub struct TemporalEdgeList {
    pub records: Vec<TemporalEdge>,
    pub node_count: usize,
    /// `external_ids[internal]` is the token the node had in the source.
    pub external_ids: Vec<String>,
    /// Self-loop records dropped at ingest.
    pub rejected_self_loops: usize,
}

impl TemporalEdgeList {
    /// Builds a list from already-dense records, validating ids and weights.
    pub fn from_records(node_count: usize, records: Vec<TemporalEdge>) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            if r.u >= node_count || r.v >= node_count {
                return Err(Error::contract(format!(
                    "record {i}: node id out of range [0, {node_count})"
                )));
            }
            if r.u == r.v {
                return Err(Error::contract(format!("record {i}: self-loop on {}", r.u)));
            }
            if !r.t.is_finite() || !(r.w.is_finite() && r.w > 0.0) {
                return Err(Error::contract(format!(
                    "record {i}: timestamp must be finite and weight positive"
                )));
            }
        }
        Ok(TemporalEdgeList {
            records,
            node_count,
            external_ids: (0..node_count).map(|i| i.to_string()).collect(),
            rejected_self_loops: 0,
        })
    }

    pub fn total_weight(&self) -> f64 {
        self.records.iter().map(|r| r.w).sum()
    }

    /// Writes records as `u v t w` lines using internal ids.
    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# temporal edges n={} records={}", self.node_count, self.records.len())?;
        for r in &self.records {
            writeln!(out, "{} {} {} {}", r.u, r.v, r.t, r.w)?;
        }
        Ok(())
    }

    /// Writes the `external-id internal-id` map.
    pub fn write_id_map<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (internal, external) in self.external_ids.iter().enumerate() {
            writeln!(out, "{external} {internal}")?;
        }
        Ok(())
    }
}

/// Parses whitespace-separated `u v t [w]` lines. `#` starts a comment line.
///
/// Self-loops are dropped and counted; any other malformed line aborts with
/// its 1-based line number.
pub fn load_temporal_edges<R: BufRead>(source: R, format: EdgeListFormat) -> Result<TemporalEdgeList> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut external_ids: Vec<String> = Vec::new();
    let mut max_dense: Option<usize> = None;
    let mut records = Vec::new();
    let mut rejected = 0usize;

    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() < 3 || fields.len() > 4 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected `u v t [w]`, found {} field(s)", fields.len()),
            });
        }
        let bad = |what: &str, tok: &str| Error::Parse {
            line: lineno,
            msg: format!("invalid {what} `{tok}`"),
        };
        let t: f64 = fields[2].parse().map_err(|_| bad("timestamp", fields[2]))?;
        if !t.is_finite() {
            return Err(bad("timestamp", fields[2]));
        }
        let w: f64 = match fields.get(3) {
            Some(tok) => tok.parse().map_err(|_| bad("weight", tok))?,
            None => 1.0,
        };
        if !(w.is_finite() && w > 0.0) {
            return Err(bad("weight", fields[3]));
        }

        let (u, v) = match format.ids {
            IdMode::Dense => {
                let u: usize = fields[0].parse().map_err(|_| bad("node id", fields[0]))?;
                let v: usize = fields[1].parse().map_err(|_| bad("node id", fields[1]))?;
                (u, v)
            }
            IdMode::Remap => {
                if fields[0] == fields[1] {
                    rejected += 1;
                    continue;
                }
                let mut intern = |tok: &str| -> usize {
                    if let Some(&id) = ids.get(tok) {
                        return id;
                    }
                    let id = external_ids.len();
                    ids.insert(tok.to_string(), id);
                    external_ids.push(tok.to_string());
                    id
                };
                (intern(fields[0]), intern(fields[1]))
            }
        };
        if u == v {
            rejected += 1;
            continue;
        }
        if format.ids == IdMode::Dense {
            max_dense = Some(max_dense.map_or(u.max(v), |m| m.max(u).max(v)));
        }
        records.push(TemporalEdge { u, v, t, w });
    }

    if rejected > 0 {
        log::warn!("dropped {rejected} self-loop record(s)");
    }

    let node_count = match format.ids {
        IdMode::Remap => external_ids.len(),
        IdMode::Dense => {
            let n = max_dense.map_or(0, |m| m + 1);
            external_ids = (0..n).map(|i| i.to_string()).collect();
            n
        }
    };

    Ok(TemporalEdgeList {
        records,
        node_count,
        external_ids,
        rejected_self_loops: rejected,
    })
}
