use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use ed_slra::solver::StartKind;
use ed_slra::structured::{load_instance, SectionKind, WeightKind};
use ed_slra_cli::eddeg::{self, TableBlock};
use ed_slra_cli::instance::{make_instance, FamilyArg, InstanceSpec, WeightArg};
use ed_slra_cli::report::RunReport;
use ed_slra_cli::reproduce::{self, Reproduction};
use ed_slra_cli::solve::{apply_overrides, solve_instance, tracker_defaults, FormulationChoice, SolveOptions};
use ed_slra_cli::{CliError, CliResult};
use serde_json::json;

/// Exact ED degrees and numerical critical points for weighted structured
/// low-rank approximation.
#[derive(Parser, Debug)]
#[command(name = "ed-slra", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact ED degrees and the published tables.
    Eddeg {
        #[command(subcommand)]
        query: EddegQuery,
    },
    /// Track all critical points of an instance.
    Solve(SolveArgs),
    /// Write a seeded random instance.
    MakeInstance(MakeArgs),
    /// Rerun a bundled example and compare with the published values.
    Reproduce {
        #[arg(value_enum)]
        name: Reproduction,
        /// Needed for example36 and catalecticant-count.
        #[arg(long)]
        allow_slow: bool,
        /// catalecticant-count: random weights instead of the tensor weights.
        #[arg(long)]
        generic_weights: bool,
        #[arg(long, env = "ED_SLRA_THREADS", default_value_t = 0)]
        threads: usize,
    },
}

#[derive(Subcommand, Debug)]
enum EddegQuery {
    /// Polar classes of rank-one matrices and their sum.
    Segre {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Generic-weight ED degree of rank ≤ r matrices under s equations.
    Generic {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        s: usize,
        #[arg(long)]
        affine: bool,
        /// Print every s from 0 to mn − 1 instead.
        #[arg(long)]
        sequence: bool,
    },
    /// Generic ED degree of Hankel matrices from binary forms of degree d.
    Hankel {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r: usize,
    },
    /// Generic ED degree of Sylvester matrices.
    Sylvester {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Generic ED degree of corank-one matrices under s equations.
    Corank1 {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        s: usize,
        #[arg(long)]
        affine: bool,
    },
    /// Unit-weight correction for corank-one matrices (conjecture-based).
    UnitGap {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        s: usize,
    },
    /// Sectional ED degrees of n × n determinants, all four blocks.
    Table1 {
        #[arg(long, default_value = "2..5")]
        n: String,
        #[arg(long)]
        csv: bool,
    },
    /// Hankel ED degrees under the coordinate metric.
    Table3Omega {
        #[arg(long)]
        csv: bool,
    },
    /// Generic-weight Sylvester ED degrees.
    Table4Generic {
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StartArg {
    TotalDegree,
    Multihomogeneous,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WeightOverride {
    Ones,
    Omega,
    Theta,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SectionArg {
    Linear,
    Affine,
}

#[derive(clap::Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    formulation: FormulationChoice,
    /// Seed for the start system and γ; derived from the clock and printed when absent.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "ED_SLRA_THREADS", default_value_t = 0)]
    threads: usize,
    /// Exit with status 2 unless exactly this many critical points are found.
    #[arg(long)]
    expect: Option<u64>,
    #[arg(long, value_enum)]
    weights: Option<WeightOverride>,
    #[arg(long)]
    r: Option<usize>,
    /// Random kernel charts for the normal formulation.
    #[arg(long)]
    chart_seed: Option<u64>,
    #[arg(long, value_enum)]
    start: Option<StartArg>,
    #[arg(long)]
    tracking_tol: Option<f64>,
    #[arg(long)]
    newton_tol: Option<f64>,
    #[arg(long)]
    dedup_tol: Option<f64>,
    #[arg(long)]
    real_tol: Option<f64>,
    #[arg(long)]
    residual_tol: Option<f64>,
    #[arg(long)]
    max_paths: Option<u128>,
    /// Report only the real critical points.
    #[arg(long)]
    real_only: bool,
}

#[derive(clap::Args, Debug)]
struct MakeArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    m: Option<usize>,
    /// Columns; the order for Hankel instances.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value = "random")]
    weights: WeightArg,
    /// Number of random linear constraints.
    #[arg(long, default_value_t = 0)]
    s: usize,
    #[arg(long, value_enum, default_value = "linear")]
    section: SectionArg,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn command_line() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

fn table_report(blocks: Vec<TableBlock>, csv: bool, started: Instant) -> CliResult<Output> {
    if csv {
        let ok = blocks.iter().all(TableBlock::matches_golden);
        return Ok(Output::Text(eddeg::to_csv(&blocks), !ok));
    }
    let mut report = RunReport::new(command_line());
    let results = eddeg::blocks_json(&blocks);
    report.agreement = results["matches_golden"].as_bool();
    report.failed = report.agreement == Some(false);
    report.results = Some(results);
    report.wall_ms = started.elapsed().as_millis() as u64;
    Ok(Output::Report(report))
}

enum Output {
    Report(RunReport),
    /// Text and whether an expectation failed.
    Text(String, bool),
}

fn eddeg_cmd(q: EddegQuery) -> CliResult<Output> {
    let started = Instant::now();
    let results = match q {
        EddegQuery::Segre { m, n } => eddeg::segre(m, n)?,
        EddegQuery::Generic { m, n, r, s, affine, sequence } => {
            if sequence {
                json!({ "m": m, "n": n, "r": r, "sequence": eddeg::generic_sequence(m, n, r)? })
            } else {
                eddeg::generic(m, n, r, s, affine)?
            }
        }
        EddegQuery::Hankel { d, r } => eddeg::hankel(d, r)?,
        EddegQuery::Sylvester { m, n, k } => eddeg::sylvester(m, n, k)?,
        EddegQuery::Corank1 { m, n, s, affine } => eddeg::corank1(m, n, s, affine)?,
        EddegQuery::UnitGap { m, n, s } => eddeg::unit_gap(m, n, s)?,
        EddegQuery::Table1 { n, csv } => {
            let (lo, hi) = eddeg::parse_range(&n)?;
            return table_report(eddeg::table1(lo, hi)?, csv, started);
        }
        EddegQuery::Table3Omega { csv } => return table_report(eddeg::table3_omega()?, csv, started),
        EddegQuery::Table4Generic { csv } => return table_report(eddeg::table4_generic()?, csv, started),
    };
    let mut report = RunReport::new(command_line());
    report.results = Some(results);
    report.wall_ms = started.elapsed().as_millis() as u64;
    Ok(Output::Report(report))
}

fn solve_cmd(a: SolveArgs) -> CliResult<Output> {
    let mut inst = load_instance(&a.input)?;
    let seed = a.seed.unwrap_or_else(|| {
        let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_nanos());
        let s = (nanos % (1u128 << 63)) as u64;
        eprintln!("seed: {s}");
        s
    });
    let mut config = tracker_defaults(a.start.map(|s| match s {
        StartArg::TotalDegree => StartKind::TotalDegree,
        StartArg::Multihomogeneous => StartKind::Multihomogeneous,
    }));
    config.seed = seed;
    config.threads = a.threads;
    let tols = [
        (a.tracking_tol, &mut config.tracking_tol),
        (a.newton_tol, &mut config.newton_tol),
        (a.dedup_tol, &mut config.dedup_tol),
        (a.real_tol, &mut config.real_tol),
        (a.residual_tol, &mut config.residual_tol),
    ];
    for (given, slot) in tols {
        if let Some(v) = given {
            *slot = v;
        }
    }
    if let Some(p) = a.max_paths {
        config.max_paths = p;
    }
    let opts = SolveOptions {
        formulation: a.formulation,
        weights: a.weights.map(|w| match w {
            WeightOverride::Ones => WeightKind::Ones,
            WeightOverride::Omega => WeightKind::Omega,
            WeightOverride::Theta => WeightKind::Theta,
        }),
        rank: a.r,
        chart_seed: a.chart_seed,
        expect: a.expect,
        real_only: a.real_only,
        config,
    };
    apply_overrides(&mut inst, &opts)?;
    let (mut report, _) = solve_instance(&inst, &opts, &command_line())?;
    report.command = command_line();
    Ok(Output::Report(report))
}

fn make_cmd(a: MakeArgs) -> CliResult<Output> {
    let spec = InstanceSpec {
        family: a.family,
        m: a.m,
        n: a.n,
        r: a.r,
        k: a.k,
        weights: a.weights,
        s: a.s,
        section: match a.section {
            SectionArg::Linear => SectionKind::Linear,
            SectionArg::Affine => SectionKind::Affine,
        },
        seed: a.seed,
    };
    let text = make_instance(&spec)?.to_json().map_err(CliError::from)? + "\n";
    match a.out {
        Some(path) => {
            std::fs::write(&path, text)?;
            Ok(Output::Text(String::new(), false))
        }
        None => Ok(Output::Text(text, false)),
    }
}

fn run(cli: Cli) -> CliResult<Output> {
    match cli.command {
        Command::Eddeg { query } => eddeg_cmd(query),
        Command::Solve(a) => solve_cmd(a),
        Command::MakeInstance(a) => make_cmd(a),
        Command::Reproduce {
            name,
            allow_slow,
            generic_weights,
            threads,
        } => {
            let mut report = reproduce::run(name, threads, allow_slow, generic_weights)?;
            report.command = command_line();
            Ok(Output::Report(report))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Output::Report(r)) => {
            println!("{}", r.to_json());
            ExitCode::from(if r.failed { 2 } else { 0 })
        }
        Ok(Output::Text(t, failed)) => {
            print!("{t}");
            ExitCode::from(if failed { 2 } else { 0 })
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
