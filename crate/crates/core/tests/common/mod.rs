//! Test-only oracles, independent of the library's solver path.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Number of eigenvalues of symmetric `b` below `lambda`: sign changes in the
/// sequence of leading principal minors of `b - lambda I`.
pub fn count_below(b: &DMatrix<f64>, lambda: f64) -> usize {
    let n = b.nrows();
    let shifted = b - DMatrix::identity(n, n) * lambda;
    let mut prev = 1.0f64;
    let mut changes = 0;
    for k in 1..=n {
        let det = shifted.view((0, 0), (k, k)).clone_owned().lu().determinant();
        if det * prev < 0.0 || (det == 0.0 && prev > 0.0) {
            changes += 1;
        }
        prev = if det == 0.0 { -prev } else { det };
    }
    changes
}

/// All eigenvalues by bisection on the determinant count over the
/// Gershgorin interval.
pub fn bisection_eigenvalues(b: &DMatrix<f64>) -> Vec<f64> {
    let n = b.nrows();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let r: f64 = (0..n).filter(|&j| j != i).map(|j| b[(i, j)].abs()).sum();
        lo = lo.min(b[(i, i)] - r);
        hi = hi.max(b[(i, i)] + r);
    }
    lo -= 1e-9 * (1.0 + lo.abs());
    hi += 1e-9 * (1.0 + hi.abs());
    (0..n)
        .map(|k| {
            let (mut a, mut c) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + c);
                if mid == a || mid == c {
                    break;
                }
                if count_below(b, mid) > k {
                    c = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + c)
        })
        .collect()
}

/// Generalized eigenvalues of `(h, diag w)` through nalgebra's symmetric
/// eigensolver on the scaled matrix.
pub fn reference_generalized(h: &DMatrix<f64>, w: &[f64]) -> Vec<f64> {
    let n = h.nrows();
    let b = DMatrix::from_fn(n, n, |i, j| h[(i, j)] / (w[i] * w[j]).sqrt());
    let b = (&b + b.transpose()) * 0.5;
    let mut v: Vec<f64> = b.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn det(m: &DMatrix<f64>) -> f64 {
    m.clone().lu().determinant()
}

pub fn diag(w: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(w))
}

/// Random symmetric centrosymmetric `A = (G + G^T + JGJ + JG^TJ) / 4` of
/// order `dim` and a random positive centrosymmetric diagonal weight.
pub fn random_centro_pair(rng: &mut ChaCha8Rng, dim: usize) -> (DMatrix<f64>, Vec<f64>) {
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
    let r = |i: usize| dim - 1 - i;
    let a = DMatrix::from_fn(dim, dim, |i, j| {
        (g[(i, j)] + g[(j, i)] + g[(r(i), r(j))] + g[(r(j), r(i))]) / 4.0
    });
    let half: Vec<f64> = (0..=dim / 2).map(|_| rng.gen_range(0.5..4.0)).collect();
    let w = (0..dim).map(|i| half[i.min(r(i))]).collect();
    (a, w)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
