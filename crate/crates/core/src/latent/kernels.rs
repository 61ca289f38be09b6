//! Row-level numerical kernels shared by every solver.

use crate::graph::GraphSnapshot;
use crate::latent::space::LatentSpace;

/// Rows with a norm at or below this are treated as all-zero.
pub const ZERO_NORM: f64 = 1e-12;

/// `2 * sqrt(n^2 - 2n + k)`, the gradient Lipschitz bound of the per-node
/// subproblem.
pub fn lipschitz_constant(n: usize, k: usize) -> f64 {
    assert!(n >= 2 && k >= 1, "lipschitz_constant needs n >= 2 and k >= 1");
    let (n, k) = (n as f64, k as f64);
    2.0 * (n * n - 2.0 * n + k).sqrt()
}

/// Scales `row` to unit norm in place. A row whose norm is at most
/// [`ZERO_NORM`] becomes the uniform row `1/sqrt(k)`. Returns `true` when the
/// fallback was taken.
pub fn row_normalize(row: &mut [f64]) -> bool {
    let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > ZERO_NORM {
        for x in row.iter_mut() {
            *x /= norm;
        }
        false
    } else {
        let fill = 1.0 / (row.len() as f64).sqrt();
        row.fill(fill);
        true
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Symmetric `k x k` matrix `Z^T Z`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Gram {
    k: usize,
    data: Vec<f64>,
}

impl Gram {
    pub fn zeros(k: usize) -> Self {
        Gram {
            k,
            data: vec![0.0; k * k],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.k + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.k).map(|i| self.get(i, i)).sum()
    }

    /// `||Z^T Z||_F^2`.
    pub fn squared_frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    /// `Gram - old^T old + new^T new`, in place.
    pub fn row_swap(&mut self, old: &[f64], new: &[f64]) {
        let k = self.k;
        for i in 0..k {
            let (oi, ni) = (old[i], new[i]);
            let line = &mut self.data[i * k..(i + 1) * k];
            for j in 0..k {
                line[j] += ni * new[j] - oi * old[j];
            }
        }
    }

    /// Adds `row^T row`.
    pub fn add_row(&mut self, row: &[f64]) {
        let k = self.k;
        for i in 0..k {
            let ri = row[i];
            let line = &mut self.data[i * k..(i + 1) * k];
            for j in 0..k {
                line[j] += ri * row[j];
            }
        }
    }

    /// `out = row * Gram` (a length-`k` row vector).
    #[inline]
    pub fn left_multiply(&self, row: &[f64], out: &mut [f64]) {
        let k = self.k;
        out.fill(0.0);
        for (i, &ri) in row.iter().enumerate() {
            if ri == 0.0 {
                continue;
            }
            let line = &self.data[i * k..(i + 1) * k];
            for (o, g) in out.iter_mut().zip(line) {
                *o += ri * g;
            }
        }
    }

    /// Recomputes `Z^T Z` from scratch into `self`.
    pub fn recompute(&mut self, z: &LatentSpace) {
        self.k = z.k();
        self.data.clear();
        self.data.resize(z.k() * z.k(), 0.0);
        for row in z.rows() {
            self.add_row(row);
        }
    }
}

/// `Z^T Z`.
pub fn gram(z: &LatentSpace) -> Gram {
    let mut g = Gram::zeros(z.k());
    g.recompute(z);
    g
}

/// `Gram - old^T old + new^T new`.
pub fn gram_row_swap(gram: &Gram, old: &[f64], new: &[f64]) -> Gram {
    let mut g = gram.clone();
    g.row_swap(old, new);
    g
}

/// `out = sum_{v in N(u)} G(u,v) Z(v)`. Returns the degree of `u`.
#[inline]
pub fn neighbor_sum(g: &GraphSnapshot, z: &LatentSpace, u: usize, out: &mut [f64]) -> usize {
    out.fill(0.0);
    let ids = g.neighbor_ids(u);
    for (&v, &w) in ids.iter().zip(g.neighbor_weights(u)) {
        for (o, x) in out.iter_mut().zip(z.row(v as usize)) {
            *o += w * x;
        }
    }
    ids.len()
}

/// Gradient of the per-node objective at the current row of `u`:
///
/// `-lambda (prev + next) + 2 Z(u) Gram - 2 Z(u) - 2 sum_{v in N(u)} G(u,v) Z(v)`
///
/// Missing temporal neighbors contribute nothing. `gram` must be `Z^T Z`
/// of the current `z`.
pub fn gradient_node(
    g: &GraphSnapshot,
    z: &LatentSpace,
    gram: &Gram,
    u: usize,
    prev_row: Option<&[f64]>,
    next_row: Option<&[f64]>,
    lambda: f64,
) -> Vec<f64> {
    gradient_at(g, z, gram, u, z.row(u), prev_row, next_row, lambda)
}

/// Same gradient expression evaluated at an arbitrary row `at` in place of
/// `Z(u)`, keeping `gram` and the neighbor rows fixed.
#[allow(clippy::too_many_arguments)]
pub fn gradient_at(
    g: &GraphSnapshot,
    z: &LatentSpace,
    gram: &Gram,
    u: usize,
    at: &[f64],
    prev_row: Option<&[f64]>,
    next_row: Option<&[f64]>,
    lambda: f64,
) -> Vec<f64> {
    let k = z.k();
    let mut nbr = vec![0.0; k];
    neighbor_sum(g, z, u, &mut nbr);
    let mut zg = vec![0.0; k];
    gram.left_multiply(at, &mut zg);
    (0..k)
        .map(|c| {
            let temporal = prev_row.map_or(0.0, |p| p[c]) + next_row.map_or(0.0, |q| q[c]);
            -lambda * temporal + 2.0 * zg[c] - 2.0 * at[c] - 2.0 * nbr[c]
        })
        .collect()
}
