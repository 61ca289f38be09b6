use std::io::{BufRead, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::latent::kernels::row_normalize;

/// Rows may deviate from unit norm by at most this much.
pub const UNIT_NORM_TOL: f64 = 1e-9;

/// One time step's embedding: `n` nonnegative rows of length `k`, each of
/// unit Euclidean norm. Stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct LatentSpace {
    n: usize,
    k: usize,
    data: Vec<f64>,
}

impl LatentSpace {
    /// Rows drawn entrywise from uniform(0,1), then normalized.
    pub fn random<R: Rng>(n: usize, k: usize, rng: &mut R) -> Self {
        let mut data: Vec<f64> = (0..n * k).map(|_| rng.gen::<f64>()).collect();
        for row in data.chunks_exact_mut(k) {
            row_normalize(row);
        }
        LatentSpace { n, k, data }
    }

    /// Every row equal to `1/sqrt(k)`.
    pub fn uniform(n: usize, k: usize) -> Self {
        LatentSpace {
            n,
            k,
            data: vec![1.0 / (k as f64).sqrt(); n * k],
        }
    }

    /// Wraps row-major data after checking the nonnegativity and unit-norm
    /// invariants.
    pub fn from_rows(n: usize, k: usize, data: Vec<f64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::contract("k must be at least 1"));
        }
        if data.len() != n * k {
            return Err(Error::dimension(format!(
                "expected {} values for {n}x{k}, got {}",
                n * k,
                data.len()
            )));
        }
        let space = LatentSpace { n, k, data };
        space.validate()?;
        Ok(space)
    }

    /// Normalizes each row of arbitrary nonnegative data.
    pub fn from_unnormalized(n: usize, k: usize, mut data: Vec<f64>) -> Result<Self> {
        if data.len() != n * k || k == 0 {
            return Err(Error::dimension(format!("{} values for {n}x{k}", data.len())));
        }
        if data.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return Err(Error::contract("entries must be finite and nonnegative"));
        }
        for row in data.chunks_exact_mut(k) {
            row_normalize(row);
        }
        Ok(LatentSpace { n, k, data })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[f64] {
        &self.data[u * self.k..(u + 1) * self.k]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, u: usize) -> &mut [f64] {
        &mut self.data[u * self.k..(u + 1) * self.k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.k)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Overwrites row `u`; the caller guarantees the row is a valid
    /// nonnegative unit vector.
    #[inline]
    pub(crate) fn set_row(&mut self, u: usize, row: &[f64]) {
        self.row_mut(u).copy_from_slice(row);
    }

    /// Copies `other` into `self`, reusing the allocation.
    pub fn copy_from(&mut self, other: &LatentSpace) {
        self.n = other.n;
        self.k = other.k;
        self.data.clear();
        self.data.extend_from_slice(&other.data);
    }

    pub fn heap_bytes(&self) -> usize {
        self.data.capacity() * std::mem::size_of::<f64>()
    }

    pub fn validate(&self) -> Result<()> {
        for (u, row) in self.rows().enumerate() {
            if row.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
                return Err(Error::contract(format!("row {u} has a negative or non-finite entry")));
            }
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::contract(format!("row {u} has norm {norm}")));
            }
        }
        Ok(())
    }

    /// Text persistence: a `n k tau` header then one line of `k` reals per
    /// row, each with 17 significant digits.
    pub fn write<W: Write>(&self, mut out: W, tau: usize) -> std::io::Result<()> {
        writeln!(out, "{} {} {}", self.n, self.k, tau)?;
        let mut line = String::new();
        for row in self.rows() {
            line.clear();
            for (c, x) in row.iter().enumerate() {
                if c > 0 {
                    line.push(' ');
                }
                line.push_str(&format!("{x:.16e}"));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    /// Reads the format produced by [`LatentSpace::write`]; returns `tau`.
    pub fn read<R: BufRead>(input: R) -> Result<(usize, Self)> {
        let mut lines = input.lines().enumerate();
        let parse_err = |line: usize, msg: String| Error::Parse { line, msg };
        let (n, k, tau) = loop {
            let (i, line) = lines
                .next()
                .ok_or_else(|| parse_err(1, "missing `n k tau` header".into()))?;
            let line = line.map_err(|e| parse_err(i + 1, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<usize> = line
                .split_whitespace()
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| parse_err(i + 1, format!("bad header `{line}`")))?;
            if f.len() != 3 {
                return Err(parse_err(i + 1, format!("bad header `{line}`")));
            }
            break (f[0], f[1], f[2]);
        };
        let mut data = Vec::with_capacity(n * k);
        for (i, line) in lines {
            let line = line.map_err(|e| parse_err(i + 1, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let before = data.len();
            for tok in line.split_whitespace() {
                let x: f64 = tok
                    .parse()
                    .map_err(|_| parse_err(i + 1, format!("bad value `{tok}`")))?;
                data.push(x);
            }
            if data.len() - before != k {
                return Err(parse_err(i + 1, format!("expected {k} values")));
            }
        }
        Ok((tau, LatentSpace::from_rows(n, k, data)?))
    }
}

/// Per-snapshot solver work.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct WorkCounters {
    /// Row updates performed.
    pub row_updates: u64,
    /// Neighbor rows read while accumulating `sum_v G(u,v) Z(v)`.
    pub neighbor_reads: u64,
    /// Multiply-adds spent in row updates and Gram maintenance.
    pub flops: u64,
    /// `sum_r |S_r ∪ N(S_r)|` over inner iterations.
    pub node_work: u64,
}

impl WorkCounters {
    pub fn add(&mut self, other: &WorkCounters) {
        self.row_updates += other.row_updates;
        self.neighbor_reads += other.neighbor_reads;
        self.flops += other.flops;
        self.node_work += other.node_work;
    }
}

/// Per-iteration affected-set sizes of the incremental solver.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct AffectedStats {
    pub affected: usize,
    /// Distinct neighbors of the affected set lying outside it.
    pub neighborhood: usize,
}

/// Fitted spaces `Z_1..Z_t` with fit diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub spaces: Vec<LatentSpace>,
    /// Whole-trajectory objective per sweep for the global solver; for the
    /// sequential solvers, the concatenation of the per-snapshot traces.
    pub objective_trace: Vec<f64>,
    /// Per snapshot, the solver's own objective at initialization followed by
    /// its value after each inner iteration.
    pub snapshot_traces: Vec<Vec<f64>>,
    /// Inner iterations (sweeps) per snapshot.
    pub iterations_used: Vec<usize>,
    pub work: Vec<WorkCounters>,
    /// Incremental solver only: affected-set sizes per snapshot and iteration.
    pub affected: Vec<Vec<AffectedStats>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.spaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spaces.is_empty()
    }

    pub fn last(&self) -> &LatentSpace {
        self.spaces.last().expect("trajectory is never empty")
    }

    pub fn total_work(&self) -> WorkCounters {
        let mut total = WorkCounters::default();
        for w in &self.work {
            total.add(w);
        }
        total
    }

    pub fn validate(&self) -> Result<()> {
        let first = self
            .spaces
            .first()
            .ok_or_else(|| Error::contract("empty trajectory"))?;
        for (tau, z) in self.spaces.iter().enumerate() {
            if z.n() != first.n() || z.k() != first.k() {
                return Err(Error::dimension(format!("space {tau} has a different shape")));
            }
            z.validate()?;
        }
        Ok(())
    }
}
