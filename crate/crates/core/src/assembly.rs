//! Collocation matrices `A` and `D^2` of `(A - mu D^2) v = 0`.
//!
//! `A[j,k] = -delta2(j-k) / h^2 + q~(kh) [j = k]` and `D^2 = diag(weight(kh))`,
//! indices `-N..=N` stored at `k + N`.

use nalgebra::DMatrix;

use crate::centro_split::CentroPacked;
use crate::error::{DescmError, Result};
use crate::problem::SLProblem;
use crate::sinc_basis::{kernel_value, DiffOrder, SincGrid};

/// Full `A` and the diagonal of `D^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSystem {
    pub a: DMatrix<f64>,
    pub d2: Vec<f64>,
    pub grid: SincGrid,
}

impl DenseSystem {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }
}

/// Number of reals generated by the dense path: all of `A` plus a full-size
/// diagonal block count for `D^2`.
pub fn dense_entries_generated(n: usize) -> usize {
    let dim = 2 * n + 1;
    dim * dim + dim
}

/// Number of reals generated by the packed path: `2N` off-diagonal Toeplitz
/// values, `N+1` diagonal values of `A` and `N+1` weights.
pub fn packed_entries_generated(n: usize) -> usize {
    (2 * n + n + 1) + (n + 1)
}

/// The distinct values that make up `(A, D^2)`.
///
/// `off[d - 1]` is `A[j,k]` for `|j - k| = d >= 1`. `diag` and `weights` are
/// indexed by storage position over the sampled `k` range.
#[derive(Debug)]
struct Generated {
    off: Vec<f64>,
    diag: Vec<f64>,
    weights: Vec<f64>,
    /// First sampled `k` (`0` when mirrored, `-N` otherwise).
    k_start: i64,
}

impl Generated {
    fn len(&self) -> usize {
        self.off.len() + self.diag.len() + self.weights.len()
    }

    fn diag_at(&self, k: i64) -> f64 {
        let k = if self.k_start == 0 { k.abs() } else { k };
        self.diag[(k - self.k_start) as usize]
    }

    fn weight_at(&self, k: i64) -> f64 {
        let k = if self.k_start == 0 { k.abs() } else { k };
        self.weights[(k - self.k_start) as usize]
    }

    fn off_at(&self, d: i64) -> f64 {
        self.off[d.unsigned_abs() as usize - 1]
    }
}

fn generate(prob: &SLProblem, grid: &SincGrid, mirror: bool) -> Result<Generated> {
    let n = grid.n() as i64;
    let h2 = grid.h() * grid.h();
    let kinetic = |d: i64| -kernel_value(DiffOrder::Two, d) / h2;
    let off = (1..=2 * n).map(kinetic).collect();
    let k_start = if mirror { 0 } else { -n };
    let center = kinetic(0);
    let mut diag = Vec::with_capacity((n - k_start + 1) as usize);
    let mut weights = Vec::with_capacity(diag.capacity());
    for k in k_start..=n {
        let x = grid.point(k);
        let q = prob.qtilde(x);
        if !q.is_finite() {
            return Err(DescmError::NonFinite {
                what: "transformed potential",
                x,
                value: q,
            });
        }
        let w = prob.weight(x);
        if !w.is_finite() {
            return Err(DescmError::NonFinite {
                what: "weight",
                x,
                value: w,
            });
        }
        if !(w > 0.0) {
            return Err(DescmError::NonPositiveWeight {
                index: grid.index_of(k),
                value: w,
            });
        }
        let value = center + q;
        if !value.is_finite() {
            return Err(DescmError::NonFinite {
                what: "diagonal of A",
                x,
                value,
            });
        }
        diag.push(value);
        weights.push(w);
    }
    Ok(Generated {
        off,
        diag,
        weights,
        k_start,
    })
}

/// Assembles the full `(2N+1) x (2N+1)` system.
///
/// When the problem commutes with parity `q~` and the weight are sampled at
/// `k = 0..=N` only and mirrored, so centrosymmetry holds bitwise.
pub fn assemble_dense(prob: &SLProblem, grid: &SincGrid) -> Result<DenseSystem> {
    let gen = generate(prob, grid, prob.parity_commutes())?;
    let n = grid.n() as i64;
    let dim = grid.dim();
    let a = DMatrix::from_fn(dim, dim, |r, c| {
        let (j, k) = (r as i64 - n, c as i64 - n);
        if j == k {
            gen.diag_at(k)
        } else {
            gen.off_at(j - k)
        }
    });
    let d2 = (-n..=n).map(|k| gen.weight_at(k)).collect();
    Ok(DenseSystem {
        a,
        d2,
        grid: grid.clone(),
    })
}

/// Assembles the Cantoni blocks directly from the `4N + 2` generated values,
/// without forming the dense matrix.
pub fn assemble_packed(prob: &SLProblem, grid: &SincGrid) -> Result<CentroPacked> {
    if !prob.parity_commutes() {
        return Err(DescmError::NotParityCommuting);
    }
    let gen = generate(prob, grid, true)?;
    debug_assert_eq!(gen.len(), packed_entries_generated(grid.n()));
    let n = grid.n();
    let ni = n as i64;
    // Block row/column a corresponds to grid index -N + a.
    CentroPacked::from_fn(
        n,
        |a, b| {
            if a == b {
                gen.diag_at(ni - a as i64)
            } else {
                gen.off_at(a as i64 - b as i64)
            }
        },
        // C[a][b] = A[1 + a, -N + b]
        |a, b| gen.off_at(1 + a as i64 + ni - b as i64),
        (0..n).map(|a| gen.off_at(ni - a as i64)).collect(),
        gen.diag_at(0),
        (0..n).map(|a| gen.weight_at(ni - a as i64)).collect(),
        gen.weight_at(0),
    )
}
