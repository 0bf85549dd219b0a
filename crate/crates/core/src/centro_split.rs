//! Block structure of symmetric centrosymmetric matrices and the splitting
//! of `det(H - lambda W) = 0` into an odd and an even half-size problem.
//!
//! A symmetric centrosymmetric `H` of order `2N+1` has the form
//!
//! ```text
//!     [ S    x     C^T  ]
//! H = [ x^T  c     x^T J]      S^T = S,  C^T = J C J
//!     [ C    J x   J S J]
//! ```
//!
//! and the orthogonal matrix
//!
//! ```text
//!                 [ I  0   -J ]
//! K = 1/sqrt(2) * [ 0  √2   0 ]
//!                 [ I  0    J ]
//! ```
//!
//! maps it to `(S - JC) ⊕ [[c, √2 x^T], [√2 x, S + JC]]`. With a diagonal
//! centrosymmetric weight `W = diag(w, w_c, Jw)` the same `K` maps `W` to
//! `diag(w) ⊕ diag(w_c, w)`.

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;

use crate::assembly::DenseSystem;
use crate::error::{DescmError, Result};

/// Relative tolerance of the centrosymmetry gate (times `max |A_ij|`).
pub const CENTRO_TOL: f64 = 1e-12;

/// Minimal storage of a symmetric centrosymmetric `A` together with a
/// diagonal centrosymmetric `D^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroPacked {
    n: usize,
    /// Lower triangle of `S`, row-major: `S[a][b]`, `b <= a`.
    s_lower: Vec<f64>,
    /// Anti-diagonal and anti-upper half of `C`: `C[a][b]`, `a + b <= N-1`.
    c_anti: Vec<f64>,
    x: Vec<f64>,
    center: f64,
    w: Vec<f64>,
    w_center: f64,
}

fn lower_index(a: usize, b: usize) -> usize {
    debug_assert!(b <= a);
    a * (a + 1) / 2 + b
}

fn anti_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a + b < n);
    // Row r holds n - r entries.
    a * n - a * a.saturating_sub(1) / 2 + b
}

impl CentroPacked {
    /// Builds the packed form from generator callbacks.
    ///
    /// `s(a, b)` for `b <= a`, `c(a, b)` for `a + b <= N-1`.
    pub(crate) fn from_fn(
        n: usize,
        s: impl Fn(usize, usize) -> f64,
        c: impl Fn(usize, usize) -> f64,
        x: Vec<f64>,
        center: f64,
        w: Vec<f64>,
        w_center: f64,
    ) -> Result<Self> {
        if x.len() != n {
            return Err(DescmError::LengthMismatch {
                expected: n,
                got: x.len(),
            });
        }
        if w.len() != n {
            return Err(DescmError::LengthMismatch {
                expected: n,
                got: w.len(),
            });
        }
        for (index, &value) in w.iter().chain(std::iter::once(&w_center)).enumerate() {
            if !(value > 0.0) {
                return Err(DescmError::NonPositiveWeight { index, value });
            }
        }
        let mut s_lower = Vec::with_capacity(n * (n + 1) / 2);
        for a in 0..n {
            for b in 0..=a {
                s_lower.push(s(a, b));
            }
        }
        let mut c_anti = Vec::with_capacity(n * (n + 1) / 2);
        for a in 0..n {
            for b in 0..n - a {
                c_anti.push(c(a, b));
            }
        }
        Ok(Self {
            n,
            s_lower,
            c_anti,
            x,
            center,
            w,
            w_center,
        })
    }

    /// Half-width `N`; the full system has order `2N+1`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self, a: usize, b: usize) -> f64 {
        if b <= a {
            self.s_lower[lower_index(a, b)]
        } else {
            self.s_lower[lower_index(b, a)]
        }
    }

    pub fn c(&self, a: usize, b: usize) -> f64 {
        let n = self.n;
        if a + b < n {
            self.c_anti[anti_index(n, a, b)]
        } else {
            // C[a][b] = C[N-1-b][N-1-a] from C^T = J C J.
            self.c_anti[anti_index(n, n - 1 - b, n - 1 - a)]
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn w_center(&self) -> f64 {
        self.w_center
    }

    /// Number of reals held.
    pub fn stored_len(&self) -> usize {
        self.s_lower.len() + self.c_anti.len() + self.x.len() + 1 + self.w.len() + 1
    }

    /// Rebuilds the dense `(A, diag D^2)` pair.
    pub fn unpack(&self) -> (DMatrix<f64>, Vec<f64>) {
        let n = self.n;
        let dim = 2 * n + 1;
        let mut a = DMatrix::zeros(dim, dim);
        for r in 0..n {
            for s in 0..n {
                let sv = self.s(r, s);
                let cv = self.c(r, s);
                a[(r, s)] = sv;
                a[(n + 1 + r, n + 1 + s)] = self.s(n - 1 - r, n - 1 - s);
                a[(n + 1 + r, s)] = cv;
                a[(s, n + 1 + r)] = cv;
            }
            a[(r, n)] = self.x[r];
            a[(n, r)] = self.x[r];
            a[(n + 1 + r, n)] = self.x[n - 1 - r];
            a[(n, n + 1 + r)] = self.x[n - 1 - r];
        }
        a[(n, n)] = self.center;
        let mut d2 = self.w.clone();
        d2.push(self.w_center);
        d2.extend(self.w.iter().rev());
        (a, d2)
    }
}

/// Two independent half-size generalized eigenproblems.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSystem {
    /// `S - JC`, order `N`.
    pub odd_h: DMatrix<f64>,
    /// `w`.
    pub odd_w: Vec<f64>,
    /// `[[center, √2 x^T], [√2 x, S + JC]]`, order `N+1`.
    pub even_h: DMatrix<f64>,
    /// `[w_center; w]`.
    pub even_w: Vec<f64>,
}

impl SplitSystem {
    pub fn n(&self) -> usize {
        self.odd_w.len()
    }

    /// Full-system vector `K^T [y; 0; 0]` for an odd-block eigenvector `y`.
    /// The result satisfies `v[-k] = -v[k]`.
    pub fn lift_odd(&self, y: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(y.len(), n);
        let mut v = vec![0.0; 2 * n + 1];
        for a in 0..n {
            v[a] = y[a] / SQRT_2;
            v[2 * n - a] = -y[a] / SQRT_2;
        }
        v
    }

    /// Full-system vector `K^T [0; z]` for an even-block eigenvector `z`.
    /// The result satisfies `v[-k] = v[k]`.
    pub fn lift_even(&self, z: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(z.len(), n + 1);
        let mut v = vec![0.0; 2 * n + 1];
        v[n] = z[0];
        for a in 0..n {
            v[a] = z[1 + a] / SQRT_2;
            v[2 * n - a] = z[1 + a] / SQRT_2;
        }
        v
    }
}

fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Checks `A[-j,-k] = A[j,k]`, `A` symmetric and `D^2[-k] = D^2[k]` within
/// `CENTRO_TOL * max |A|`.
fn check_centrosymmetric(a: &DMatrix<f64>, d2: &[f64]) -> Result<()> {
    let dim = a.nrows();
    let scale = max_abs(a).max(f64::MIN_POSITIVE);
    let tolerance = CENTRO_TOL * scale;
    let mut centro_dev = 0.0f64;
    let mut sym_dev = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            centro_dev = centro_dev.max((a[(i, j)] - a[(dim - 1 - i, dim - 1 - j)]).abs());
            sym_dev = sym_dev.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    if sym_dev > tolerance {
        return Err(DescmError::NotSymmetric {
            max_deviation: sym_dev,
            tolerance,
        });
    }
    let w_scale = d2.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let w_dev = (0..dim).fold(0.0f64, |m, i| m.max((d2[i] - d2[dim - 1 - i]).abs()));
    if centro_dev > tolerance || w_dev > CENTRO_TOL * w_scale {
        return Err(DescmError::NotCentrosymmetric {
            max_deviation: centro_dev.max(w_dev),
            tolerance,
        });
    }
    Ok(())
}

/// Reads the Cantoni blocks off a dense system, after checking that it is
/// symmetric centrosymmetric.
pub fn extract_blocks(sys: &DenseSystem) -> Result<CentroPacked> {
    let dim = sys.a.nrows();
    if dim.is_multiple_of(2) || sys.a.ncols() != dim {
        return Err(DescmError::InvalidGrid(format!(
            "expected a square matrix of odd order, got {}x{}",
            sys.a.nrows(),
            sys.a.ncols()
        )));
    }
    if sys.d2.len() != dim {
        return Err(DescmError::LengthMismatch {
            expected: dim,
            got: sys.d2.len(),
        });
    }
    check_centrosymmetric(&sys.a, &sys.d2)?;
    let n = dim / 2;
    let a = &sys.a;
    CentroPacked::from_fn(
        n,
        |r, s| a[(r, s)],
        |r, s| a[(n + 1 + r, s)],
        (0..n).map(|r| a[(r, n)]).collect(),
        a[(n, n)],
        sys.d2[..n].to_vec(),
        sys.d2[n],
    )
}

/// Forms the odd and bordered even subproblems.
pub fn split(packed: &CentroPacked) -> SplitSystem {
    let n = packed.n();
    // (JC)[a][b] = C[N-1-a][b]
    let jc = |a: usize, b: usize| packed.c(n - 1 - a, b);
    let odd_h = DMatrix::from_fn(n, n, |a, b| packed.s(a, b) - jc(a, b));
    let even_h = DMatrix::from_fn(n + 1, n + 1, |a, b| match (a, b) {
        (0, 0) => packed.center(),
        (0, b) => SQRT_2 * packed.x()[b - 1],
        (a, 0) => SQRT_2 * packed.x()[a - 1],
        (a, b) => packed.s(a - 1, b - 1) + jc(a - 1, b - 1),
    });
    let mut even_w = Vec::with_capacity(n + 1);
    even_w.push(packed.w_center());
    even_w.extend_from_slice(packed.w());
    SplitSystem {
        odd_h,
        odd_w: packed.w().to_vec(),
        even_h,
        even_w,
    }
}

/// The orthogonal matrix `K` of order `2N+1`.
pub fn k_matrix(n: usize) -> DMatrix<f64> {
    let dim = 2 * n + 1;
    let r = 1.0 / SQRT_2;
    let mut k = DMatrix::zeros(dim, dim);
    for a in 0..n {
        // top block row: [I 0 -J]
        k[(a, a)] = r;
        k[(a, 2 * n - a)] = -r;
        // bottom block row: [I 0 J]
        k[(n + 1 + a, a)] = r;
        k[(n + 1 + a, 2 * n - a)] = r;
    }
    k[(n, n)] = 1.0;
    k
}

/// `(K A K^T, K D^2 K^T)`.
#[derive(Debug, Clone)]
pub struct SimilarPair {
    pub a: DMatrix<f64>,
    pub w: DMatrix<f64>,
}

/// Applies the `K` similarity to a centrosymmetric dense system.
pub fn k_similarity(sys: &DenseSystem) -> Result<SimilarPair> {
    extract_blocks(sys)?;
    let dim = sys.a.nrows();
    let k = k_matrix(dim / 2);
    let kt = k.transpose();
    let w = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&sys.d2));
    Ok(SimilarPair {
        a: &k * &sys.a * &kt,
        w: &k * w * &kt,
    })
}
