//! Convergence benchmarks on anharmonic oscillators with known energies.
//!
//! Each run builds the `sinh`-mapped problem, picks the mesh size from the
//! Lambert W rule, assembles either the dense system or its packed
//! centrosymmetric form, and solves. Records carry the selected eigenvalue,
//! its absolute error against the exact energy, timings and the number of
//! matrix entries generated.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use log::warn;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::assembly::{
    assemble_dense, assemble_packed, dense_entries_generated, packed_entries_generated,
};
use crate::centro_split::split;
use crate::eigsolve::solve_generalized;
use crate::error::{DescmError, Result};
use crate::problem::{AnharmonicPotential, SLProblem};
use crate::sinc_basis::SincGrid;
use crate::special_fn::{optimal_h, MeshParams};

/// Default sweep `N = 4, 8, ..., 64`.
pub const DEFAULT_NMIN: usize = 4;
pub const DEFAULT_NMAX: usize = 64;
pub const DEFAULT_STEP: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    Split,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::Split => "split",
        })
    }
}

impl FromStr for Mode {
    type Err = DescmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Mode::Full),
            "split" => Ok(Mode::Split),
            other => Err(DescmError::InvalidRequest(format!("unknown mode {other:?}"))),
        }
    }
}

/// Parity of a full-system eigenvector under `v[k] -> v[-k]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// An anharmonic potential with an optional known energy level.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkCase {
    pub name: String,
    pub potential: AnharmonicPotential,
    pub exact_value: Option<f64>,
    pub exact_level: usize,
}

impl BenchmarkCase {
    fn known(name: &str, coeffs: Vec<f64>, level: usize, value: f64) -> Self {
        Self {
            name: name.to_string(),
            potential: AnharmonicPotential::new(coeffs).expect("built-in potential is valid"),
            exact_value: Some(value),
            exact_level: level,
        }
    }

    /// `V1..V4`, potentials with energies known in closed form.
    pub fn builtins() -> Vec<Self> {
        vec![
            Self::known("V1", vec![1.0, -4.0, 1.0], 0, -2.0),
            Self::known("V2", vec![4.0, -6.0, 1.0], 1, -9.0),
            Self::known(
                "V3",
                vec![105.0 / 64.0, -43.0 / 8.0, 1.0, -1.0, 1.0],
                0,
                3.0 / 8.0,
            ),
            Self::known(
                "V4",
                vec![169.0 / 64.0, -59.0 / 8.0, 1.0, -1.0, 1.0],
                1,
                9.0 / 8.0,
            ),
        ]
    }

    pub fn builtin(name: &str) -> Option<Self> {
        Self::builtins()
            .into_iter()
            .find(|c| c.name.eq_ignore_ascii_case(name))
    }

    /// A user potential without a reference value.
    pub fn custom(name: impl Into<String>, potential: AnharmonicPotential) -> Self {
        Self {
            name: name.into(),
            potential,
            exact_value: None,
            exact_level: 0,
        }
    }

    /// Exact value for `level`, if known.
    pub fn exact_for(&self, level: usize) -> Option<f64> {
        (level == self.exact_level).then_some(self.exact_value).flatten()
    }
}

/// One line of the convergence table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    pub case: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub h: f64,
    pub mode: Mode,
    pub eigenvalue: f64,
    pub abs_error: Option<f64>,
    pub assemble_time: f64,
    pub solve_time: f64,
    pub entries_generated: usize,
    pub level: usize,
    /// Block the eigenvalue came from (split mode only).
    #[serde(skip_serializing)]
    pub parity: Option<Parity>,
}

/// Sorted spectrum of one solve, with block attribution in split mode.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub parity: Vec<Option<Parity>>,
    /// Full-system eigenvectors, `D^2`-orthonormal, aligned with `values`.
    pub vectors: Option<Vec<Vec<f64>>>,
}

/// Everything one `(potential, N, mode)` solve produced.
#[derive(Debug, Clone)]
pub struct CaseRun {
    pub grid: SincGrid,
    pub mode: Mode,
    pub spectrum: Spectrum,
    pub assemble_time: Duration,
    pub solve_time: Duration,
    pub entries_generated: usize,
}

/// Grid for `N` with the Lambert W mesh size.
pub fn benchmark_grid(potential: &AnharmonicPotential, n: usize) -> Result<SincGrid> {
    let h = optimal_h(&MeshParams::new(potential.m(), potential.leading(), n)?)?;
    SincGrid::new(n, h)
}

fn columns(v: &DMatrix<f64>) -> Vec<Vec<f64>> {
    v.column_iter().map(|c| c.iter().copied().collect()).collect()
}

/// Assembles and solves one system.
pub fn solve_case(
    potential: &AnharmonicPotential,
    n: usize,
    mode: Mode,
    want_vectors: bool,
) -> Result<CaseRun> {
    if n < 2 {
        return Err(DescmError::InvalidRequest(format!("N must be >= 2, got {n}")));
    }
    let grid = benchmark_grid(potential, n)?;
    let prob = SLProblem::anharmonic(potential);
    let (spectrum, assemble_time, solve_time, entries_generated) = match mode {
        Mode::Full => {
            let t0 = Instant::now();
            let sys = assemble_dense(&prob, &grid)?;
            let assemble_time = t0.elapsed();
            let t1 = Instant::now();
            let res = solve_generalized(&sys.a, &sys.d2, want_vectors)?;
            let solve_time = t1.elapsed();
            let spectrum = Spectrum {
                parity: vec![None; res.values.len()],
                vectors: res.vectors.as_ref().map(columns),
                values: res.values,
            };
            (spectrum, assemble_time, solve_time, dense_entries_generated(n))
        }
        Mode::Split => {
            let t0 = Instant::now();
            let packed = assemble_packed(&prob, &grid)?;
            let assemble_time = t0.elapsed();
            let t1 = Instant::now();
            let sys = split(&packed);
            let odd = solve_generalized(&sys.odd_h, &sys.odd_w, want_vectors)?;
            let even = solve_generalized(&sys.even_h, &sys.even_w, want_vectors)?;
            let solve_time = t1.elapsed();

            let mut merged: Vec<(f64, Parity, Option<Vec<f64>>)> = Vec::new();
            let lifted = |res: &crate::eigsolve::EigResult, lift: &dyn Fn(&[f64]) -> Vec<f64>| {
                res.vectors
                    .as_ref()
                    .map(|v| columns(v).iter().map(|c| lift(c)).collect::<Vec<_>>())
            };
            let odd_vecs = lifted(&odd, &|y| sys.lift_odd(y));
            let even_vecs = lifted(&even, &|z| sys.lift_even(z));
            for (i, &v) in odd.values.iter().enumerate() {
                merged.push((v, Parity::Odd, odd_vecs.as_ref().map(|vs| vs[i].clone())));
            }
            for (i, &v) in even.values.iter().enumerate() {
                merged.push((v, Parity::Even, even_vecs.as_ref().map(|vs| vs[i].clone())));
            }
            merged.sort_by(|a, b| a.0.total_cmp(&b.0));
            let spectrum = Spectrum {
                values: merged.iter().map(|m| m.0).collect(),
                parity: merged.iter().map(|m| Some(m.1)).collect(),
                vectors: want_vectors
                    .then(|| merged.into_iter().map(|m| m.2.unwrap()).collect()),
            };
            (spectrum, assemble_time, solve_time, packed_entries_generated(n))
        }
    };
    Ok(CaseRun {
        grid,
        mode,
        spectrum,
        assemble_time,
        solve_time,
        entries_generated,
    })
}

fn expected_parity(level: usize) -> Parity {
    if level.is_multiple_of(2) {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// Runs one case and reports the requested levels (sorted-spectrum indices).
pub fn run_case_levels(
    case: &BenchmarkCase,
    n: usize,
    mode: Mode,
    levels: &[usize],
) -> Result<Vec<ConvergenceRecord>> {
    let run = solve_case(&case.potential, n, mode, false)?;
    levels
        .iter()
        .map(|&level| {
            let eigenvalue = *run.spectrum.values.get(level).ok_or_else(|| {
                DescmError::InvalidRequest(format!(
                    "level {level} requested but the system has {} eigenvalues",
                    run.spectrum.values.len()
                ))
            })?;
            let parity = run.spectrum.parity[level];
            if let Some(p) = parity {
                if p != expected_parity(level) {
                    warn!(
                        "{} N={n}: level {level} came from the {p:?} block, expected {:?}",
                        case.name,
                        expected_parity(level)
                    );
                }
            }
            Ok(ConvergenceRecord {
                case: case.name.clone(),
                n,
                h: run.grid.h(),
                mode,
                eigenvalue,
                abs_error: case.exact_for(level).map(|e| (eigenvalue - e).abs()),
                assemble_time: run.assemble_time.as_secs_f64(),
                solve_time: run.solve_time.as_secs_f64(),
                entries_generated: run.entries_generated,
                level,
                parity,
            })
        })
        .collect()
}

/// Runs the case's own reference level.
pub fn run_case(case: &BenchmarkCase, n: usize, mode: Mode) -> Result<ConvergenceRecord> {
    Ok(run_case_levels(case, n, mode, &[case.exact_level])?.remove(0))
}

/// A failed `(case, N, mode)` point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub case: String,
    pub n: usize,
    pub mode: Mode,
    pub error: DescmError,
}

#[derive(Debug, Clone, Default)]
pub struct SweepReport {
    pub records: Vec<ConvergenceRecord>,
    pub failures: Vec<SweepFailure>,
}

/// What to sweep.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub cases: Vec<BenchmarkCase>,
    pub n_list: Vec<usize>,
    pub modes: Vec<Mode>,
    /// Levels to report; `None` means each case's reference level.
    pub levels: Option<Vec<usize>>,
}

/// `nmin, nmin + step, ..., <= nmax`.
pub fn n_range(nmin: usize, nmax: usize, step: usize) -> Result<Vec<usize>> {
    if step == 0 {
        return Err(DescmError::InvalidRequest("step must be positive".into()));
    }
    if nmin > nmax {
        return Err(DescmError::InvalidRequest(format!(
            "nmin {nmin} exceeds nmax {nmax}"
        )));
    }
    Ok((nmin..=nmax).step_by(step).collect())
}

/// Sweeps one case over `n_list` in every mode.
pub fn run_sweep(case: &BenchmarkCase, n_list: &[usize], modes: &[Mode]) -> Result<SweepReport> {
    run_plan(
        &SweepPlan {
            cases: vec![case.clone()],
            n_list: n_list.to_vec(),
            modes: modes.to_vec(),
            levels: None,
        },
        None,
    )
}

/// Runs a whole plan, in parallel over `(case, N, mode)` when `threads`
/// allows. Output order is `(case, N, mode, level)` regardless of scheduling.
pub fn run_plan(plan: &SweepPlan, threads: Option<usize>) -> Result<SweepReport> {
    if plan.n_list.is_empty() {
        return Err(DescmError::InvalidRequest("N list is empty".into()));
    }
    if plan.n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DescmError::InvalidRequest(
            "N list must be strictly ascending".into(),
        ));
    }
    if plan.modes.is_empty() || plan.cases.is_empty() {
        return Err(DescmError::InvalidRequest(
            "need at least one case and one mode".into(),
        ));
    }
    let mut modes = plan.modes.clone();
    modes.sort();
    modes.dedup();

    let tasks: Vec<(usize, usize, Mode)> = (0..plan.cases.len())
        .flat_map(|c| {
            let modes = &modes;
            plan.n_list
                .iter()
                .flat_map(move |&n| modes.iter().map(move |&m| (c, n, m)))
        })
        .collect();

    let run_task = |&(c, n, mode): &(usize, usize, Mode)| {
        let case = &plan.cases[c];
        let levels = plan
            .levels
            .clone()
            .unwrap_or_else(|| vec![case.exact_level]);
        (c, n, mode, run_case_levels(case, n, mode, &levels))
    };

    let results: Vec<_> = match threads {
        Some(1) => tasks.iter().map(run_task).collect(),
        _ => {
            let mut builder = rayon::ThreadPoolBuilder::new();
            if let Some(t) = threads {
                builder = builder.num_threads(t);
            }
            let pool = builder
                .build()
                .map_err(|e| DescmError::InvalidRequest(format!("thread pool: {e}")))?;
            pool.install(|| tasks.par_iter().map(run_task).collect())
        }
    };

    let mut report = SweepReport::default();
    let mut keyed: Vec<(usize, ConvergenceRecord)> = Vec::new();
    for (c, n, mode, outcome) in results {
        match outcome {
            Ok(records) => keyed.extend(records.into_iter().map(|r| (c, r))),
            Err(error) => report.failures.push(SweepFailure {
                case: plan.cases[c].name.clone(),
                n,
                mode,
                error,
            }),
        }
    }
    keyed.sort_by(|(ca, a), (cb, b)| {
        ca.cmp(cb)
            .then(a.n.cmp(&b.n))
            .then(a.mode.cmp(&b.mode))
            .then(a.level.cmp(&b.level))
            .then(a.eigenvalue.partial_cmp(&b.eigenvalue).unwrap_or(Ordering::Equal))
    });
    report.records = keyed.into_iter().map(|(_, r)| r).collect();
    Ok(report)
}

pub fn write_csv<W: Write>(records: &[ConvergenceRecord], out: W) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()
}

/// A JSON array, one object per record.
pub fn write_json<W: Write>(records: &[ConvergenceRecord], mut out: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, records)?;
    writeln!(out)
}
