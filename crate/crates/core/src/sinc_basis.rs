//! Sinc kernel, translated Sinc basis functions and the unit-mesh Sinc
//! differentiation kernels.
//!
//! The differentiation kernels are Toeplitz: the entry for `(j, k)` only
//! depends on the offset `d = j - k`. Even orders are symmetric in `d`,
//! odd orders are skew-symmetric, so storing offsets `0..=2N` is enough for
//! a `(2N+1) x (2N+1)` matrix.

use std::f64::consts::PI;

use crate::error::{DescmError, Result};

/// Below this value of `|pi z|` the series expansion of sinc is used.
const SERIES_CUTOFF: f64 = 1e-4;

/// `sin(pi z) / (pi z)`, with the removable singularity filled in.
pub fn sinc(z: f64) -> f64 {
    let pz = PI * z;
    if pz.abs() < SERIES_CUTOFF {
        let p2 = pz * pz;
        1.0 - p2 / 6.0 + p2 * p2 / 120.0
    } else {
        pz.sin() / pz
    }
}

/// The translated Sinc function `S(j, h)(x) = sinc((x - j h) / h)`.
pub fn sinc_basis(j: i64, h: f64, x: f64) -> f64 {
    sinc((x - j as f64 * h) / h)
}

/// Symmetric collocation grid `{k h : -N <= k <= N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SincGrid {
    n: usize,
    h: f64,
    points: Vec<f64>,
}

impl SincGrid {
    pub fn new(n: usize, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(DescmError::InvalidGrid(format!(
                "mesh size must be positive and finite, got {h}"
            )));
        }
        let half = n as i64;
        // (-k) * h == -(k * h) exactly, so the grid is symmetric bitwise.
        let points = (-half..=half).map(|k| k as f64 * h).collect();
        Ok(Self { n, h, points })
    }

    /// Half-width `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Mesh size.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// System dimension `2N + 1`.
    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    /// Collocation points in storage order; `points()[0]` is `-N h`.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Storage index of the point `k h`, `-N <= k <= N`.
    pub fn index_of(&self, k: i64) -> usize {
        debug_assert!(k.unsigned_abs() as usize <= self.n);
        (k + self.n as i64) as usize
    }

    /// The point `k h`.
    pub fn point(&self, k: i64) -> f64 {
        self.points[self.index_of(k)]
    }
}

/// Order of a Sinc differentiation kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffOrder {
    Zero,
    One,
    Two,
}

impl DiffOrder {
    pub fn as_u32(self) -> u32 {
        match self {
            DiffOrder::Zero => 0,
            DiffOrder::One => 1,
            DiffOrder::Two => 2,
        }
    }

    pub fn is_even(self) -> bool {
        !matches!(self, DiffOrder::One)
    }
}

impl TryFrom<u32> for DiffOrder {
    type Error = DescmError;

    fn try_from(order: u32) -> Result<Self> {
        match order {
            0 => Ok(DiffOrder::Zero),
            1 => Ok(DiffOrder::One),
            2 => Ok(DiffOrder::Two),
            other => Err(DescmError::UnsupportedOrder(other)),
        }
    }
}

/// Closed form of `delta^(l)` at offset `d = j - k` for a typed order.
pub fn kernel_value(order: DiffOrder, d: i64) -> f64 {
    if d == 0 {
        return match order {
            DiffOrder::Zero => 1.0,
            DiffOrder::One => 0.0,
            DiffOrder::Two => -PI * PI / 3.0,
        };
    }
    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
    let df = d as f64;
    match order {
        DiffOrder::Zero => 0.0,
        // h d/dx S(j,h)(x) at x = kh is sinc'(k - j) = (-1)^(k-j) / (k-j).
        DiffOrder::One => -sign / df,
        DiffOrder::Two => -2.0 * sign / (df * df),
    }
}

/// Unit-mesh Sinc differentiation kernel `delta^(order)` at offset `d = j - k`.
pub fn diff_kernel(order: u32, d: i64) -> Result<f64> {
    Ok(kernel_value(DiffOrder::try_from(order)?, d))
}

/// Toeplitz storage of a differentiation kernel for a `(2N+1)`-point grid:
/// values at offsets `0..=2N`, the negative offsets follow from parity.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffKernel {
    order: DiffOrder,
    values: Vec<f64>,
}

impl DiffKernel {
    pub fn new(order: DiffOrder, n: usize) -> Self {
        let values = (0..=2 * n as i64)
            .map(|d| kernel_value(order, d))
            .collect();
        Self { order, values }
    }

    pub fn order(&self) -> DiffOrder {
        self.order
    }

    /// Stored values for offsets `0..=2N`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at offset `d`, `|d| <= 2N`.
    pub fn get(&self, d: i64) -> f64 {
        let v = self.values[d.unsigned_abs() as usize];
        if d < 0 && !self.order.is_even() {
            -v
        } else {
            v
        }
    }
}

/// Symmetric truncated Sinc expansion `sum_j coeffs[j] S(j, h)(x)`,
/// with `coeffs[0]` belonging to `j = -N`.
pub fn truncated_expansion(coeffs: &[f64], grid: &SincGrid, x: f64) -> Result<f64> {
    if coeffs.len() != grid.dim() {
        return Err(DescmError::LengthMismatch {
            expected: grid.dim(),
            got: coeffs.len(),
        });
    }
    let n = grid.n() as i64;
    Ok(coeffs
        .iter()
        .zip(-n..=n)
        .map(|(c, j)| c * sinc_basis(j, grid.h(), x))
        .sum())
}
