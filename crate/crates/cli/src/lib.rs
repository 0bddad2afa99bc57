//! Command-line front end: `solve`, `oracle`, `stats`, `bench` and `convert`.
//!
//! Exit codes: 0 success, 1 I/O or internal failure, 2 usage error, 3 data
//! error, 4 solver limit or failure.

pub mod report;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use robtnep_core::ccg::{solve_robust_tnep, CcgLimits, CcgStatus, Method};
use robtnep_core::model::{validate, Network};
use robtnep_core::operation::enumerate_exact;
use robtnep_core::sizes::size_report;
use robtnep_core::{ingest, CoreError};
use robtnep_milp::SolverKind;

use report::{emit_table, parse_csv, parse_markdown, RunReport, TableRow};

pub const SOLVER_ENV: &str = "ROB_TNEP_SOLVER";

#[derive(Debug, Parser)]
#[command(name = "rob-tnep", version, about = "Robust transmission expansion planning")]
struct Cli {
    /// Log progress (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the robust problem for one case and write result, trace and table.
    Solve(SolveArgs),
    /// Brute-force the robust optimum of a small case.
    Oracle(OracleArgs),
    /// Print the sizes of both worst-case subproblems.
    Stats { case: String },
    /// Solve a case x budget grid and emit a timing table.
    Bench(BenchArgs),
    /// Re-write a case (built-in name or file) in the canonical format.
    Convert { input: String, output: PathBuf },
}

#[derive(Debug, Args)]
struct BudgetArgs {
    /// Generation budget, applied to every region.
    #[arg(long, conflicts_with = "gamma_file")]
    gamma_gen: Option<u32>,
    /// Demand budget, applied to every region.
    #[arg(long, conflicts_with = "gamma_file")]
    gamma_dem: Option<u32>,
    /// JSON file with per-region budgets: {"gamma_gen": {...}, "gamma_dem": {...}}.
    #[arg(long)]
    gamma_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// LP/MILP backend; the ROB_TNEP_SOLVER variable takes precedence.
    #[arg(long, default_value = "builtin")]
    solver: String,
}

#[derive(Debug, Args)]
struct SolveArgs {
    case: String,
    #[arg(long, default_value = "dual")]
    method: Method,
    #[command(flatten)]
    budgets: BudgetArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Relative optimality gap of the outer loop.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = robtnep_core::ccg::DEFAULT_MAX_ITERATIONS)]
    max_iterations: usize,
}

#[derive(Debug, Args)]
struct OracleArgs {
    case: String,
    #[command(flatten)]
    budgets: BudgetArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated cases (built-in names or files).
    #[arg(long, value_delimiter = ',', default_value = "garver6")]
    cases: Vec<String>,
    /// Budget points as G:D pairs; defaults to each built-in case's grid.
    #[arg(long, value_delimiter = ',')]
    budgets: Vec<String>,
    #[arg(long, default_value_t = 5)]
    repeat: usize,
    #[arg(long, default_value = "dual")]
    method: Method,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Cells solved at once; timings are only comparable with 1.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(anyhow::Error),
    Solver(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Data(_) => 3,
            Failure::Solver(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Data(e) => write!(f, "data error: {e:#}"),
            Failure::Solver(e) => write!(f, "solver error: {e:#}"),
            Failure::Io(e) => write!(f, "error: {e:#}"),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        if e.is_data_error() {
            Failure::Data(e.into())
        } else {
            Failure::Solver(e.into())
        }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("{f}");
            f.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Solve(a) => solve(a),
        Command::Oracle(a) => oracle(a),
        Command::Stats { case } => stats(&case),
        Command::Bench(a) => bench(a),
        Command::Convert { input, output } => convert(&input, &output),
    }
}

fn load(case: &str) -> Outcome<Network> {
    ingest::load_case(case).map_err(|e| Failure::Data(anyhow!(e).context(format!("loading `{case}`"))))
}

fn solver_kind(flag: &str) -> Outcome<SolverKind> {
    let (value, source) = match std::env::var(SOLVER_ENV) {
        Ok(v) if !v.is_empty() => (v, SOLVER_ENV),
        _ => (flag.to_owned(), "--solver"),
    };
    value.parse().map_err(|e| Failure::Usage(format!("{source}: {e}")))
}

fn apply_budgets(net: Network, b: &BudgetArgs) -> Outcome<Network> {
    let mut net = net;
    if let Some(path) = &b.gamma_file {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::Data)?;
        let budgets = ingest::parse_budgets(&bytes).map_err(|e| Failure::Data(e.into()))?;
        net.uncertainty = budgets;
    }
    let regions: Vec<String> = net.regions().into_iter().map(str::to_owned).collect();
    if let Some(g) = b.gamma_gen {
        net.uncertainty.gamma_gen = regions.iter().map(|r| (r.clone(), g)).collect();
    }
    if let Some(d) = b.gamma_dem {
        net.uncertainty.gamma_dem = regions.iter().map(|r| (r.clone(), d)).collect();
    }
    validate(net).map_err(|e| Failure::Data(anyhow!(e).context("budgets")))
}

fn write(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Io)
}

fn solve_once(net: &Network, method: Method, kind: SolverKind, limits: &CcgLimits) -> Outcome<(robtnep_core::ccg::CcgResult, f64)> {
    let solver = kind.instantiate();
    let t = Instant::now();
    let result = solve_robust_tnep(net, method, solver.as_ref(), limits)?;
    Ok((result, t.elapsed().as_secs_f64()))
}

fn solve(a: SolveArgs) -> Outcome {
    let kind = solver_kind(&a.solver.solver)?;
    if a.max_iterations == 0 {
        return Err(Failure::Usage("--max-iterations must be positive".into()));
    }
    let mut net = apply_budgets(load(&a.case)?, &a.budgets)?;
    if let Some(eps) = a.epsilon {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Failure::Usage(format!("--epsilon must be positive, got {eps}")));
        }
        net.config.epsilon = eps;
    }
    let limits = CcgLimits {
        max_iterations: a.max_iterations,
        ..CcgLimits::default()
    };
    let (result, seconds) = solve_once(&net, a.method, kind, &limits)?;
    let report = RunReport::new(&net, a.method, &kind.to_string(), &result, size_report(&net), vec![seconds]);

    fs::create_dir_all(&a.out)
        .with_context(|| format!("creating {}", a.out.display()))
        .map_err(Failure::Io)?;
    let stem = format!("{}.{}", report.case, report.budget_tag());
    let file = |suffix: &str| a.out.join(format!("{stem}.{suffix}"));
    let json = serde_json::to_string_pretty(&report).expect("reports serialize");
    write(&file("result.json"), &(json + "\n"))?;
    write(&file("trace.jsonl"), &result.trace_jsonl())?;
    let table = emit_table(std::slice::from_ref(&report)).map_err(Failure::Io)?;
    write(&file("table.md"), &table.markdown)?;

    println!("case {} ({}, {} solver), budgets {}", report.case, report.method, report.solver, report.budgets());
    println!("status {:?} after {} iterations", report.status, report.iterations);
    println!("objective {}", report.objective);
    println!("bounds [{}, {}]", report.z_lo, report.z_up);
    println!("investment {} (lines {:?})", report.investment_cost, report.built_lines);
    println!("worst-case operating cost {}", report.worst_case_cost);
    println!("wrote {}.*", a.out.join(&stem).display());
    if report.status == CcgStatus::IterationLimit {
        return Err(Failure::Solver(anyhow!(
            "ccg: iteration limit {} reached with gap {}",
            a.max_iterations,
            result.trace.last().map_or(f64::INFINITY, |r| r.gap)
        )));
    }
    Ok(())
}

fn oracle(a: OracleArgs) -> Outcome {
    let kind = solver_kind(&a.solver.solver)?;
    let net = apply_budgets(load(&a.case)?, &a.budgets)?;
    let solver = kind.instantiate();
    let exact = enumerate_exact(&net, solver.as_ref())?;
    let built: Vec<usize> = exact.plan.built_lines(&net).into_iter().map(|k| k + 1).collect();
    println!("case {}, {} plans x {} vertices", net.name, exact.plans_evaluated, exact.vertices);
    println!("objective {}", exact.objective);
    println!("investment {} (lines {:?})", exact.plan.investment_cost, built);
    println!("worst-case operating cost {}", exact.plan.gamma);
    println!("worst scenario: generators {:?}, demands {:?}", exact.worst_scenario.z_gen, exact.worst_scenario.z_dem);
    Ok(())
}

fn stats(case: &str) -> Outcome {
    let net = load(case)?;
    let t = Instant::now();
    let s = size_report(&net);
    let elapsed = t.elapsed();
    let [ng, nd, nb, nl] = s.dims;
    let triple = |m: robtnep_core::sizes::ModelSize| format!("({}, {}, {})", m.binaries, m.continuous, m.equations);
    println!("case {}: n_g = {ng}, n_d = {nd}, n_b = {nb}, n_l = {nl}", net.name);
    println!("sizes as (binaries, continuous, equations)");
    println!("dual: {}", triple(s.dual_measured));
    println!("  closed form {}; {} rows including parameter definitions", triple(s.dual_predicted), s.dual_raw.equations);
    println!("kkt: {}", triple(s.kkt_measured));
    println!("  closed form {}", triple(s.kkt_predicted));
    println!(
        "ratios kkt/dual: binaries {:.2}, continuous {:.2}, equations {:.2}",
        s.kkt_measured.binaries as f64 / s.dual_measured.binaries.max(1) as f64,
        s.kkt_measured.continuous as f64 / s.dual_measured.continuous.max(1) as f64,
        s.kkt_measured.equations as f64 / s.dual_measured.equations.max(1) as f64,
    );
    println!("built in {:.3} ms", elapsed.as_secs_f64() * 1e3);
    Ok(())
}

/// Budget points solved by `bench` for the built-in cases.
pub fn default_grid(case: &str) -> Vec<(u32, u32)> {
    match case {
        "garver6" => vec![(3, 5), (2, 3), (1, 2), (0, 0)],
        "ieee24" => vec![(10, 17), (7, 12), (3, 5), (0, 0)],
        "ieee118" => vec![(54, 91), (35, 60), (15, 20), (0, 0)],
        _ => vec![(0, 0)],
    }
}

fn parse_budget_pair(s: &str) -> Outcome<(u32, u32)> {
    let bad = || Failure::Usage(format!("--budgets expects G:D pairs, got `{s}`"));
    let (g, d) = s.split_once(':').ok_or_else(bad)?;
    Ok((g.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?))
}

/// Runs every cell `repeat` times and returns one report per cell.
pub fn bench_reports(
    cases: &[Network],
    grid: &dyn Fn(&Network) -> Vec<(u32, u32)>,
    repeat: usize,
    method: Method,
    kind: SolverKind,
    jobs: usize,
) -> Outcome<Vec<RunReport>> {
    let mut cells = Vec::new();
    for net in cases {
        for (g, d) in grid(net) {
            let cell = validate(net.clone().with_uniform_budgets(g, d))
                .map_err(|e| Failure::Data(anyhow!(e).context(format!("{} at G={g} D={d}", net.name))))?;
            cells.push(cell);
        }
    }
    let run_cell = |net: &Network| -> Outcome<RunReport> {
        let limits = CcgLimits::default();
        let mut seconds = Vec::with_capacity(repeat);
        let mut last = None;
        for _ in 0..repeat {
            let (result, t) = solve_once(net, method, kind, &limits)?;
            seconds.push(t);
            last = Some(result);
        }
        let result = last.expect("repeat is positive");
        log::info!("bench {}: objective {} in {} iterations", net.name, result.objective(), result.iterations);
        Ok(RunReport::new(net, method, &kind.to_string(), &result, size_report(net), seconds))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Io(e.into()))?;
    pool.install(|| cells.par_iter().map(run_cell).collect())
}

fn bench(a: BenchArgs) -> Outcome {
    let kind = solver_kind(&a.solver.solver)?;
    if a.repeat == 0 {
        return Err(Failure::Usage("--repeat must be at least 1".into()));
    }
    if a.jobs == 0 {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    let pairs: Vec<(u32, u32)> = a.budgets.iter().map(|s| parse_budget_pair(s)).collect::<Outcome<_>>()?;
    let cases: Vec<Network> = a.cases.iter().map(|c| load(c)).collect::<Outcome<_>>()?;
    let grid = |net: &Network| if pairs.is_empty() { default_grid(&net.name) } else { pairs.clone() };
    let reports = bench_reports(&cases, &grid, a.repeat, a.method, kind, a.jobs)?;

    let table = emit_table(&reports).map_err(Failure::Io)?;
    fs::create_dir_all(&a.out)
        .with_context(|| format!("creating {}", a.out.display()))
        .map_err(Failure::Io)?;
    let json = serde_json::to_string_pretty(&reports).expect("reports serialize");
    let paths = [
        (a.out.join("bench.reports.json"), json + "\n"),
        (a.out.join("bench.table.md"), table.markdown.clone()),
        (a.out.join("bench.table.csv"), table.csv.clone()),
    ];
    for (path, contents) in &paths {
        write(path, contents)?;
    }
    verify_bench(&a.out, &reports).map_err(Failure::Io)?;
    print!("{}", table.markdown);
    Ok(())
}

/// Re-reads the files written by `bench` and compares them with `reports`.
pub fn verify_bench(dir: &Path, reports: &[RunReport]) -> anyhow::Result<()> {
    let read = |name: &str| fs::read_to_string(dir.join(name)).with_context(|| format!("reading back {name}"));
    let parsed: Vec<RunReport> = serde_json::from_str(&read("bench.reports.json")?)?;
    anyhow::ensure!(parsed == reports, "bench.reports.json does not reproduce the reports");
    let rows: Vec<TableRow> = reports.iter().map(TableRow::from).collect();
    anyhow::ensure!(parse_markdown(&read("bench.table.md")?)? == rows, "bench.table.md does not reproduce the reports");
    anyhow::ensure!(parse_csv(&read("bench.table.csv")?)? == rows, "bench.table.csv does not reproduce the reports");
    Ok(())
}

fn convert(input: &str, output: &Path) -> Outcome {
    let net = load(input)?;
    write(output, &ingest::serialize(&net))?;
    println!("wrote {} ({} buses, {} lines)", output.display(), net.buses.len(), net.lines.len());
    Ok(())
}
