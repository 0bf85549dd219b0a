mod common;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use descm::bench::{benchmark_grid, run_plan, run_sweep, solve_case, BenchmarkCase, Mode, SweepPlan};
use descm::problem::vtilde_sinh;
use descm::{
    assemble_dense, assemble_packed, diff_kernel, extract_blocks, k_similarity, solve_generalized,
    split, truncated_expansion, AnharmonicPotential, ConformalMap, DenseSystem, SLProblem, SincGrid,
};

use common::{det, diag, random_centro_pair, reference_generalized, rel_close};

fn system_from(a: DMatrix<f64>, w: Vec<f64>) -> DenseSystem {
    let n = (a.nrows() - 1) / 2;
    DenseSystem {
        a,
        d2: w,
        grid: SincGrid::new(n, 1.0).unwrap(),
    }
}

fn union_spectrum(sys: &DenseSystem) -> Vec<f64> {
    let s = split(&extract_blocks(sys).unwrap());
    let odd = solve_generalized(&s.odd_h, &s.odd_w, false).unwrap();
    let even = solve_generalized(&s.even_h, &s.even_w, false).unwrap();
    let mut all: Vec<f64> = odd.values.into_iter().chain(even.values).collect();
    all.sort_by(f64::total_cmp);
    all
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_union_matches_dense(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, w) = random_centro_pair(&mut rng, 2 * n + 1);
        let reference = reference_generalized(&a, &w);
        let union = union_spectrum(&system_from(a, w));
        prop_assert_eq!(union.len(), reference.len());
        for (x, y) in union.iter().zip(&reference) {
            prop_assert!(rel_close(*x, *y, 1e-10), "{} vs {}", x, y);
        }
    }

    #[test]
    fn kernel_parity_holds(d in -200i64..200) {
        prop_assert_eq!(diff_kernel(0, d).unwrap(), diff_kernel(0, -d).unwrap());
        prop_assert_eq!(diff_kernel(1, d).unwrap(), -diff_kernel(1, -d).unwrap());
        prop_assert_eq!(diff_kernel(2, d).unwrap(), diff_kernel(2, -d).unwrap());
    }

    #[test]
    fn expansion_collocates(n in 1usize..12, h in 0.05f64..2.0, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = SincGrid::new(n, h).unwrap();
        let coeffs: Vec<f64> = (0..grid.dim()).map(|_| rng.gen_range(-3.0..3.0)).collect();
        for (i, &x) in grid.points().iter().enumerate() {
            let v = truncated_expansion(&coeffs, &grid, x).unwrap();
            prop_assert!((v - coeffs[i]).abs() <= 1e-12 * (1.0 + coeffs[i].abs()));
        }
    }

    #[test]
    fn transformed_potential_is_even(x in 0.0f64..6.0, case in 0usize..4) {
        let p = &BenchmarkCase::builtins()[case].potential;
        prop_assert_eq!(vtilde_sinh(p, x).unwrap(), vtilde_sinh(p, -x).unwrap());
    }
}

#[test]
fn lifted_vectors_have_parity_and_small_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [1, 3, 6] {
        let (a, w) = random_centro_pair(&mut rng, 2 * n + 1);
        let sys = system_from(a.clone(), w.clone());
        let s = split(&extract_blocks(&sys).unwrap());
        let odd = solve_generalized(&s.odd_h, &s.odd_w, true).unwrap();
        let even = solve_generalized(&s.even_h, &s.even_w, true).unwrap();
        let check = |mu: f64, v: Vec<f64>, sign: f64| {
            let dim = v.len();
            for k in 0..dim {
                assert!((v[k] - sign * v[dim - 1 - k]).abs() < 1e-14);
            }
            let v = DVector::from_vec(v);
            let r = &a * &v - diag(&w) * &v * mu;
            assert!(r.norm() <= 1e-11 * (a.norm() + mu.abs() * 4.0) * v.norm());
        };
        let ov = odd.vectors.unwrap();
        for (i, &mu) in odd.values.iter().enumerate() {
            let y: Vec<f64> = ov.column(i).iter().copied().collect();
            check(mu, s.lift_odd(&y), -1.0);
        }
        let ev = even.vectors.unwrap();
        for (i, &mu) in even.values.iter().enumerate() {
            let z: Vec<f64> = ev.column(i).iter().copied().collect();
            check(mu, s.lift_even(&z), 1.0);
        }
    }
}

#[test]
fn determinant_factorizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (a, w) = random_centro_pair(&mut rng, 5);
    let s = split(&extract_blocks(&system_from(a.clone(), w.clone())).unwrap());
    for lambda in [-1.3, 0.0, 0.4, 2.5] {
        let full = det(&(&a - diag(&w) * lambda));
        let fact = det(&(&s.odd_h - diag(&s.odd_w) * lambda)) * det(&(&s.even_h - diag(&s.even_w) * lambda));
        assert!(rel_close(full, fact, 1e-10), "{full} vs {fact}");
    }
}

#[test]
fn similarity_is_block_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (a, w) = random_centro_pair(&mut rng, 9);
    let pair = k_similarity(&system_from(a, w)).unwrap();
    for i in 0..4 {
        for j in 4..9 {
            assert!(pair.a[(i, j)].abs() < 1e-14 && pair.a[(j, i)].abs() < 1e-14);
            assert!(pair.w[(i, j)].abs() < 1e-14);
        }
    }
}

#[test]
fn worked_three_by_three() {
    let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 2.0, 1.0, 5.0, 1.0, 2.0, 1.0, 4.0]);
    let w = vec![2.0, 1.0, 2.0];
    let union = union_spectrum(&system_from(a.clone(), w.clone()));
    let reference = reference_generalized(&a, &w);
    for (x, y) in union.iter().zip(&reference) {
        assert!((x - y).abs() < 1e-13);
    }
    // odd block alone gives (4 - 2) / 2
    assert!(union.iter().any(|v| (v - 1.0).abs() < 1e-14));
}

#[test]
fn packed_assembly_matches_dense_bitwise() {
    for case in BenchmarkCase::builtins() {
        let prob = SLProblem::anharmonic(&case.potential);
        for n in 2..=20 {
            let grid = benchmark_grid(&case.potential, n).unwrap();
            let dense = assemble_dense(&prob, &grid).unwrap();
            let (a, w) = assemble_packed(&prob, &grid).unwrap().unpack();
            assert_eq!(a, dense.a, "{} N={n}", case.name);
            assert_eq!(w, dense.d2);
            assert_eq!(extract_blocks(&dense).unwrap(), assemble_packed(&prob, &grid).unwrap());
        }
    }
}

#[test]
fn weights_positive_and_inertia_follows_eigenvalue_signs() {
    // A itself need not be definite: its inertia matches that of the
    // generalized spectrum because D^2 is positive definite.
    for case in BenchmarkCase::builtins() {
        let prob = SLProblem::anharmonic(&case.potential);
        for n in [4, 12, 24] {
            let grid = benchmark_grid(&case.potential, n).unwrap();
            let sys = assemble_dense(&prob, &grid).unwrap();
            assert!(sys.d2.iter().all(|&w| w > 0.0));
            let gen = reference_generalized(&sys.a, &sys.d2);
            let plain = sys.a.clone().symmetric_eigen().eigenvalues;
            let neg_gen = gen.iter().filter(|&&v| v < 0.0).count();
            let neg_plain = plain.iter().filter(|&&v| v < 0.0).count();
            assert_eq!(neg_gen, neg_plain, "{} N={n}", case.name);
            for k in 0..=n as i64 {
                assert_eq!(prob.qtilde(grid.point(k)), prob.qtilde(grid.point(-k)));
            }
        }
    }
}

#[test]
fn v1_ground_state_from_dense_solve() {
    let v1 = BenchmarkCase::builtin("V1").unwrap();
    let run = solve_case(&v1.potential, 20, Mode::Full, false).unwrap();
    assert!((run.spectrum.values[0] + 2.0).abs() < 1e-6);
}

#[test]
fn v2_sweep_converges() {
    let v2 = BenchmarkCase::builtin("V2").unwrap();
    let report = run_sweep(&v2, &[4, 16, 32, 48, 64], &[Mode::Split]).unwrap();
    assert!(report.failures.is_empty());
    assert!(report.records.last().unwrap().abs_error.unwrap() <= 1e-8);
}

#[test]
fn modes_agree_and_sweeps_are_deterministic() {
    let plan = SweepPlan {
        cases: BenchmarkCase::builtins(),
        n_list: vec![4, 8, 12, 16],
        modes: vec![Mode::Full, Mode::Split],
        levels: Some(vec![0, 1, 2]),
    };
    let strip = |threads| {
        run_plan(&plan, threads)
            .unwrap()
            .records
            .into_iter()
            .map(|r| (r.case, r.n, r.h.to_bits(), r.mode, r.level, r.eigenvalue.to_bits(), r.entries_generated))
            .collect::<Vec<_>>()
    };
    let serial = strip(Some(1));
    assert_eq!(serial, strip(None));
    assert_eq!(serial.len(), 4 * 4 * 2 * 3);
    for pair in serial.chunks(6) {
        // (full l0, l1, l2, split l0, l1, l2)
        for l in 0..3 {
            let (f, s) = (f64::from_bits(pair[l].5), f64::from_bits(pair[l + 3].5));
            assert!(rel_close(f, s, 1e-10), "{f} vs {s}");
        }
    }
}

#[test]
fn non_parity_problems_are_refused() {
    let odd = SLProblem::new(
        Arc::new(|x| x * x + x * x * x),
        Arc::new(|_| 1.0),
        ConformalMap::sinh(),
        false,
        true,
    )
    .unwrap();
    let grid = SincGrid::new(4, 0.3).unwrap();
    assert!(assemble_packed(&odd, &grid).is_err());
    assert!(extract_blocks(&assemble_dense(&odd, &grid).unwrap()).is_err());

    let p: AnharmonicPotential = "1,1".parse().unwrap();
    assert!(assemble_packed(&SLProblem::anharmonic(&p), &grid).is_ok());
}
