//! Dense symmetric eigensolver (cyclic Jacobi) and the reduction of
//! `H v = lambda diag(w) v` to a standard problem.

use nalgebra::DMatrix;

use crate::error::{DescmError, Result};

/// Stop once `max |B_ij| <= CONVERGENCE_TOL * ||B||_F`.
pub const CONVERGENCE_TOL: f64 = 1e-13;
/// Sweep cap.
pub const MAX_SWEEPS: usize = 30;
/// Relative symmetry tolerance on input.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues in ascending order, optionally with eigenvectors as columns.
///
/// For [`eig_symmetric`] the vectors are orthonormal. For
/// [`solve_generalized`] they are `diag(w)`-orthonormal.
#[derive(Debug, Clone, PartialEq)]
pub struct EigResult {
    pub values: Vec<f64>,
    pub vectors: Option<DMatrix<f64>>,
    /// Jacobi sweeps performed.
    pub iterations: usize,
    /// Largest off-diagonal magnitude left on exit.
    pub max_offdiag: f64,
}

fn check_symmetric(b: &DMatrix<f64>) -> Result<()> {
    if !b.is_square() {
        return Err(DescmError::NotSymmetric {
            max_deviation: f64::INFINITY,
            tolerance: 0.0,
        });
    }
    let n = b.nrows();
    let scale = b.amax();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            dev = dev.max((b[(i, j)] - b[(j, i)]).abs());
        }
    }
    let tolerance = SYMMETRY_TOL * scale;
    if dev > tolerance || dev.is_nan() {
        return Err(DescmError::NotSymmetric {
            max_deviation: dev,
            tolerance,
        });
    }
    Ok(())
}

fn check_weights(w: &[f64]) -> Result<()> {
    match w.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        Some(index) => Err(DescmError::NonPositiveWeight {
            index,
            value: w[index],
        }),
        None => Ok(()),
    }
}

/// `B = diag(w)^(-1/2) H diag(w)^(-1/2)`.
pub fn reduce_generalized(h: &DMatrix<f64>, w: &[f64]) -> Result<DMatrix<f64>> {
    check_symmetric(h)?;
    if w.len() != h.nrows() {
        return Err(DescmError::LengthMismatch {
            expected: h.nrows(),
            got: w.len(),
        });
    }
    check_weights(w)?;
    let inv_sqrt: Vec<f64> = w.iter().map(|v| 1.0 / v.sqrt()).collect();
    let mut b = DMatrix::from_fn(h.nrows(), h.ncols(), |i, j| {
        h[(i, j)] * inv_sqrt[i] * inv_sqrt[j]
    });
    // Keep exact symmetry; the product above may differ by an ulp across the diagonal.
    for i in 0..b.nrows() {
        for j in 0..i {
            b[(i, j)] = b[(j, i)];
        }
    }
    Ok(b)
}

/// Row-major working copy used by the rotations.
struct Work {
    n: usize,
    a: Vec<f64>,
    v: Option<Vec<f64>>,
}

impl Work {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    fn max_offdiag(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                m = m.max(self.at(i, j).abs());
            }
        }
        m
    }

    /// Annihilates `a[p][q]`, `p < q`.
    fn rotate(&mut self, p: usize, q: usize) {
        let n = self.n;
        let apq = self.a[p * n + q];
        if apq == 0.0 {
            return;
        }
        let app = self.a[p * n + p];
        let aqq = self.a[q * n + q];
        let theta = (aqq - app) / (2.0 * apq);
        let t = if theta.abs() > 1e150 {
            0.5 / theta
        } else {
            theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
        };
        let c = 1.0 / (t * t + 1.0).sqrt();
        let s = t * c;
        let tau = s / (1.0 + c);

        self.a[p * n + p] = app - t * apq;
        self.a[q * n + q] = aqq + t * apq;
        self.a[p * n + q] = 0.0;
        self.a[q * n + p] = 0.0;
        for r in 0..n {
            if r == p || r == q {
                continue;
            }
            let arp = self.a[r * n + p];
            let arq = self.a[r * n + q];
            let new_rp = arp - s * (arq + tau * arp);
            let new_rq = arq + s * (arp - tau * arq);
            self.a[r * n + p] = new_rp;
            self.a[p * n + r] = new_rp;
            self.a[r * n + q] = new_rq;
            self.a[q * n + r] = new_rq;
        }
        if let Some(v) = self.v.as_mut() {
            for r in 0..n {
                let vrp = v[r * n + p];
                let vrq = v[r * n + q];
                v[r * n + p] = vrp - s * (vrq + tau * vrp);
                v[r * n + q] = vrq + s * (vrp - tau * vrq);
            }
        }
    }
}

fn sorted_result(
    values: Vec<f64>,
    vectors: Option<DMatrix<f64>>,
    iterations: usize,
    max_offdiag: f64,
) -> EigResult {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = vectors.map(|v| {
        DMatrix::from_fn(v.nrows(), v.ncols(), |r, c| v[(r, order[c])])
    });
    EigResult {
        values: sorted_values,
        vectors: sorted_vectors,
        iterations,
        max_offdiag,
    }
}

fn eig_2x2(b: &DMatrix<f64>, want_vectors: bool) -> EigResult {
    let (a, off, d) = (b[(0, 0)], b[(0, 1)], b[(1, 1)]);
    let mean = 0.5 * (a + d);
    let radius = (0.5 * (a - d)).hypot(off);
    let values = vec![mean - radius, mean + radius];
    let vectors = want_vectors.then(|| {
        let mut work = Work {
            n: 2,
            a: vec![a, off, off, d],
            v: Some(vec![1.0, 0.0, 0.0, 1.0]),
        };
        work.rotate(0, 1);
        let v = work.v.unwrap();
        // Rotated diagonal tells which column belongs to the smaller value.
        if work.a[0] <= work.a[3] {
            DMatrix::from_row_slice(2, 2, &v)
        } else {
            DMatrix::from_row_slice(2, 2, &[v[1], v[0], v[3], v[2]])
        }
    });
    EigResult {
        values,
        vectors,
        iterations: usize::from(off != 0.0),
        max_offdiag: 0.0,
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
pub fn eig_symmetric(b: &DMatrix<f64>, want_vectors: bool) -> Result<EigResult> {
    check_symmetric(b)?;
    let n = b.nrows();
    match n {
        0 => {
            return Ok(EigResult {
                values: vec![],
                vectors: want_vectors.then(|| DMatrix::zeros(0, 0)),
                iterations: 0,
                max_offdiag: 0.0,
            })
        }
        1 => {
            return Ok(EigResult {
                values: vec![b[(0, 0)]],
                vectors: want_vectors.then(|| DMatrix::identity(1, 1)),
                iterations: 0,
                max_offdiag: 0.0,
            })
        }
        2 => return Ok(eig_2x2(b, want_vectors)),
        _ => {}
    }

    let mut work = Work {
        n,
        a: b.transpose().as_slice().to_vec(),
        v: want_vectors.then(|| DMatrix::<f64>::identity(n, n).as_slice().to_vec()),
    };
    let threshold = CONVERGENCE_TOL * b.norm();
    let mut sweeps = 0;
    let mut off = work.max_offdiag();
    while off > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(DescmError::NoConvergence {
                sweeps,
                max_offdiag: off,
            });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = work.at(p, q);
                // Negligible relative to both diagonal entries: drop it.
                if sweeps > 3
                    && work.at(p, p).abs() + 100.0 * apq.abs() == work.at(p, p).abs()
                    && work.at(q, q).abs() + 100.0 * apq.abs() == work.at(q, q).abs()
                {
                    work.a[p * n + q] = 0.0;
                    work.a[q * n + p] = 0.0;
                    continue;
                }
                work.rotate(p, q);
            }
        }
        sweeps += 1;
        off = work.max_offdiag();
    }

    let values = (0..n).map(|i| work.at(i, i)).collect();
    // Row-major v -> column-major matrix with eigenvectors as columns.
    let vectors = work.v.map(|v| DMatrix::from_row_slice(n, n, &v));
    Ok(sorted_result(values, vectors, sweeps, off))
}

/// Solves `H v = lambda diag(w) v`. Returned vectors satisfy `V^T diag(w) V = I`.
pub fn solve_generalized(h: &DMatrix<f64>, w: &[f64], want_vectors: bool) -> Result<EigResult> {
    let b = reduce_generalized(h, w)?;
    let mut res = eig_symmetric(&b, want_vectors)?;
    if let Some(v) = res.vectors.as_mut() {
        for (r, wr) in w.iter().enumerate() {
            let scale = 1.0 / wr.sqrt();
            for c in 0..v.ncols() {
                v[(r, c)] *= scale;
            }
        }
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Number of eigenvalues below `lambda`, counted from sign changes of the
    /// leading principal minors of `B - lambda I` (LU determinants).
    fn count_below(b: &DMatrix<f64>, lambda: f64) -> usize {
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

    /// Bisection oracle for all eigenvalues on the Gershgorin interval.
    fn bisection_eigenvalues(b: &DMatrix<f64>) -> Vec<f64> {
        let n = b.nrows();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let r: f64 = (0..n).filter(|&j| j != i).map(|j| b[(i, j)].abs()).sum();
            lo = lo.min(b[(i, i)] - r);
            hi = hi.max(b[(i, i)] + r);
        }
        lo -= 1e-9;
        hi += 1e-9;
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

    fn lcg_matrix(n: usize, seed: u64) -> DMatrix<f64> {
        let mut state = seed;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let g = DMatrix::from_fn(n, n, |_, _| next());
        (&g + g.transpose()) * 0.5
    }

    #[test]
    fn diagonal_and_swap() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 2.0]));
        assert_eq!(eig_symmetric(&d, false).unwrap().values, vec![1.0, 2.0, 3.0]);
        let s = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(eig_symmetric(&s, false).unwrap().values, vec![-1.0, 1.0]);
    }

    #[test]
    fn two_by_two_vectors() {
        let s = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 0.5]);
        let res = eig_symmetric(&s, true).unwrap();
        let v = res.vectors.unwrap();
        for c in 0..2 {
            let col = v.column(c);
            let r = &s * col - col * res.values[c];
            assert!(r.norm() < 1e-14);
        }
    }

    #[test]
    fn random_matches_bisection_oracle() {
        for (n, seed) in [(3, 1), (5, 2), (6, 3), (8, 4), (8, 5)] {
            let b = lcg_matrix(n, seed);
            let jac = eig_symmetric(&b, false).unwrap().values;
            let oracle = bisection_eigenvalues(&b);
            let scale = b.norm().max(1.0);
            for (x, y) in jac.iter().zip(&oracle) {
                assert!((x - y).abs() <= 1e-9 * scale, "n={n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn vectors_orthonormal_and_reconstruct() {
        let b = lcg_matrix(12, 7);
        let res = eig_symmetric(&b, true).unwrap();
        let v = res.vectors.unwrap();
        let vtv = v.transpose() * &v;
        assert!((vtv - DMatrix::identity(12, 12)).amax() <= 1e-12);
        let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(res.values.clone()));
        let rec = &v * lam * v.transpose();
        assert!((rec - &b).norm() <= 1e-12 * b.norm());
        assert!(res.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn reduction_examples() {
        let h = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        assert_eq!(reduce_generalized(&h, &[1.0, 1.0]).unwrap(), h);
        let one = DMatrix::from_element(1, 1, 4.0);
        let res = solve_generalized(&one, &[4.0], false).unwrap();
        assert_eq!(res.values, vec![1.0]);

        let b = reduce_generalized(&h, &[1.0, 4.0]).unwrap();
        assert_eq!(b, DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 0.5]));
        let res = solve_generalized(&h, &[1.0, 4.0], false).unwrap();
        let r13 = 13f64.sqrt();
        assert!((res.values[0] - (5.0 - r13) / 4.0).abs() < 1e-14);
        assert!((res.values[1] - (5.0 + r13) / 4.0).abs() < 1e-14);

        let res = solve_generalized(&DMatrix::identity(2, 2), &[2.0, 2.0], false).unwrap();
        assert!(res.values.iter().all(|v| (v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn generalized_residuals() {
        let h = lcg_matrix(9, 11);
        let w: Vec<f64> = (0..9).map(|i| 1.0 + i as f64 * 0.75).collect();
        let res = solve_generalized(&h, &w, true).unwrap();
        let v = res.vectors.unwrap();
        let wmax = w.iter().cloned().fold(0.0, f64::max);
        for (c, &lam) in res.values.iter().enumerate() {
            let col = v.column(c);
            let wv = nalgebra::DVector::from_fn(9, |r, _| w[r] * col[r]);
            let r = &h * col - wv * lam;
            assert!(r.norm() <= 1e-10 * (h.norm() + lam.abs() * wmax) * col.norm());
        }
    }

    #[test]
    fn error_paths() {
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 1.0]);
        assert!(matches!(
            eig_symmetric(&h, false),
            Err(DescmError::NotSymmetric { .. })
        ));
        let h = DMatrix::identity(2, 2);
        assert!(matches!(
            reduce_generalized(&h, &[1.0, 0.0]),
            Err(DescmError::NonPositiveWeight { index: 1, .. })
        ));
        assert!(matches!(
            reduce_generalized(&h, &[1.0]),
            Err(DescmError::LengthMismatch { .. })
        ));
    }
}
