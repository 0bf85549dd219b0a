use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::{error, info};

use descm::bench::{
    n_range, run_plan, write_csv, write_json, BenchmarkCase, Mode, SweepPlan, DEFAULT_NMAX,
    DEFAULT_NMIN, DEFAULT_STEP,
};
use descm::AnharmonicPotential;

#[derive(Parser, Debug)]
#[command(name = "descm", version, about = "Sinc collocation eigenvalue benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep N for one or more potentials and write a convergence table.
    Run(RunArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Full,
    Split,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// Built-in potentials (V1, V2, V3, V4 or all), comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "coeffs")]
    potential: Vec<String>,

    /// Custom potential coefficients c1,...,cm of sum c_i x^(2i).
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,

    /// Levels (indices into the sorted spectrum) to report. Defaults to each
    /// built-in's reference level, or 0 for custom potentials.
    #[arg(long, value_delimiter = ',')]
    levels: Vec<usize>,

    #[arg(long, default_value_t = DEFAULT_NMIN)]
    nmin: usize,

    #[arg(long, default_value_t = DEFAULT_NMAX)]
    nmax: usize,

    #[arg(long, default_value_t = DEFAULT_STEP)]
    step: usize,

    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    mode: ModeArg,

    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn threads_from_env() -> Option<usize> {
    let raw = std::env::var("DESCM_THREADS").ok()?;
    match raw.trim().parse::<usize>() {
        Ok(t) if t > 0 => Some(t),
        _ => {
            error!("ignoring DESCM_THREADS={raw:?}: expected a positive integer");
            None
        }
    }
}

fn cases(args: &RunArgs) -> Result<Vec<BenchmarkCase>, String> {
    if let Some(coeffs) = &args.coeffs {
        let p: AnharmonicPotential = coeffs.parse().map_err(|e| format!("{e}"))?;
        return Ok(vec![BenchmarkCase::custom("custom", p)]);
    }
    if args.potential.is_empty() || args.potential.iter().any(|p| p.eq_ignore_ascii_case("all")) {
        return Ok(BenchmarkCase::builtins());
    }
    args.potential
        .iter()
        .map(|name| {
            BenchmarkCase::builtin(name.trim())
                .ok_or_else(|| format!("unknown potential {name:?} (expected V1..V4)"))
        })
        .collect()
}

fn run(args: RunArgs) -> Result<bool, String> {
    let plan = SweepPlan {
        cases: cases(&args)?,
        n_list: n_range(args.nmin, args.nmax, args.step).map_err(|e| e.to_string())?,
        modes: match args.mode {
            ModeArg::Full => vec![Mode::Full],
            ModeArg::Split => vec![Mode::Split],
            ModeArg::Both => vec![Mode::Full, Mode::Split],
        },
        levels: (!args.levels.is_empty()).then(|| args.levels.clone()),
    };
    let report = run_plan(&plan, threads_from_env()).map_err(|e| e.to_string())?;

    let out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| format!("{}: {e}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match args.format {
        Format::Csv => write_csv(&report.records, out),
        Format::Json => write_json(&report.records, out),
    }
    .map_err(|e| format!("writing output: {e}"))?;

    for f in &report.failures {
        error!("{} N={} {}: {}", f.case, f.n, f.mode, f.error);
    }
    info!(
        "{} records, {} failed points",
        report.records.len(),
        report.failures.len()
    );
    Ok(report.failures.is_empty())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match run(args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
        },
    }
}
