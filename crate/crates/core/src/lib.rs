//! Eigenvalues of Sturm-Liouville problems by double-exponential Sinc
//! collocation.
//!
//! When the operator commutes with parity the collocation matrices are
//! symmetric centrosymmetric, and the `(2N+1)`-dimensional generalized
//! eigenproblem splits into an `N`-dimensional odd problem and an
//! `(N+1)`-dimensional even problem, built from `1/(N+1)` of the entries.
//!
//! ```
//! use descm::bench::{run_case, BenchmarkCase, Mode};
//!
//! let v1 = BenchmarkCase::builtin("V1").unwrap();
//! let rec = run_case(&v1, 32, Mode::Split).unwrap();
//! assert!((rec.eigenvalue + 2.0).abs() < 1e-8);
//! ```

pub mod assembly;
pub mod bench;
pub mod centro_split;
pub mod eigsolve;
pub mod error;
pub mod problem;
pub mod sinc_basis;
pub mod special_fn;

pub use assembly::{assemble_dense, assemble_packed, DenseSystem};
pub use centro_split::{extract_blocks, k_similarity, split, CentroPacked, SplitSystem};
pub use eigsolve::{eig_symmetric, reduce_generalized, solve_generalized, EigResult};
pub use error::{DescmError, Result};
pub use problem::{
    make_anharmonic_problem, qtilde_generic, vtilde_sinh, AnharmonicPotential, ConformalMap,
    SLProblem,
};
pub use sinc_basis::{diff_kernel, sinc, sinc_basis, truncated_expansion, DiffKernel, SincGrid};
pub use special_fn::{lambert_w0, optimal_h, MeshParams};
