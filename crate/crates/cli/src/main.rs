use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ivsolve_core::bench::{self, BenchCell, BenchSuite, SuiteReport};
use ivsolve_core::check::{run_checks, CheckConfig};
use ivsolve_core::expr::{parse_system, print_system};
use ivsolve_core::models::{builtin, BUILTIN_NAMES};
use ivsolve_core::round;
use ivsolve_core::solvers::{solve, Method, RunReport, SolverConfig};
use ivsolve_core::SystemModel;

const EXIT_INPUT: u8 = 1;
const EXIT_BUDGET: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "ivsolve",
    version,
    about = "Interval enclosure of steady states of uncertain nonlinear systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one solver on a built-in model or a model file.
    Solve(SolveArgs),
    /// Run a named reproduction suite (table4 ... table9).
    Bench(BenchArgs),
    /// List the built-in models, or print one in model-file syntax.
    Models(ModelsArgs),
    /// Run the fast invariant battery.
    Check(CheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Built-in model name or path to a model file.
    #[arg(long)]
    model: String,
    /// Size of the parameterised built-in networks.
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long)]
    method: Method,
    #[arg(long)]
    eps: Option<f64>,
    /// Subdivisions per dimension.
    #[arg(long)]
    m: Option<usize>,
    /// Iteration cap per box.
    #[arg(long, conflicts_with = "l")]
    nit: Option<u32>,
    /// Contractor sweeps per grid box (same as --nit).
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    max_boxes: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct BenchArgs {
    suite: String,
    /// Allow the suites that take minutes to hours.
    #[arg(long)]
    allow_long: bool,
    /// Timed repetitions per cell; more than one adds an untimed warm-up.
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long)]
    max_boxes: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct ModelsArgs {
    /// Print this model in model-file syntax.
    #[arg(long)]
    print: Option<String>,
    #[arg(long, default_value_t = 2)]
    n: usize,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Containment trials per interval operation.
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, hide = true)]
    inject_rounding_fault: bool,
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INPUT)
}

fn load_model(spec: &str, n: usize) -> Result<SystemModel, String> {
    if BUILTIN_NAMES.contains(&spec) {
        return builtin(spec, n).map_err(|e| e.to_string());
    }
    let text = fs::read_to_string(spec).map_err(|e| format!("cannot read model `{spec}`: {e}"))?;
    parse_system(&text).map_err(|e| format!("{spec}: {e}"))
}

fn emit(out: &OutputArgs, body: &str) -> Result<(), String> {
    match &out.output {
        Some(path) => write_file(path, body),
        None => io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| format!("cannot write to standard output: {e}")),
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), String> {
    fs::write(path, body).map_err(|e| format!("cannot write `{}`: {e}", path.display()))
}

fn suite_body(report: &SuiteReport, format: Format) -> Result<String, String> {
    match format {
        Format::Csv => bench::csv_string(report),
        Format::Json => bench::json_string(report).map(|s| s + "\n"),
    }
    .map_err(|e| e.to_string())
}

fn solve_body(
    model: &SystemModel,
    cfg: &SolverConfig,
    report: RunReport,
    format: Format,
) -> Result<String, String> {
    match format {
        Format::Json => {
            let doc = serde_json::json!({
                "schema_version": bench::SCHEMA_VERSION,
                "report": report,
            });
            serde_json::to_string_pretty(&doc)
                .map(|s| s + "\n")
                .map_err(|e| e.to_string())
        }
        Format::Csv => {
            let predicted = bench::predict_workload(&bench::CostModelInputs::for_run(model, cfg))
                .map_err(|e| e.to_string())?;
            let measured = bench::measured_work(&report);
            let suite = SuiteReport {
                schema_version: bench::SCHEMA_VERSION,
                suite: "solve".into(),
                repetitions: 1,
                cells: vec![bench::CellResult {
                    label: model.name().to_string(),
                    setting: setting_label(cfg),
                    predicted_work: predicted,
                    measured_work: measured,
                    work_ratio: measured as f64 / predicted,
                    published: None,
                    wall_time_s: report.wall_time_s,
                    report,
                }],
            };
            suite_body(&suite, Format::Csv)
        }
    }
}

fn setting_label(cfg: &SolverConfig) -> String {
    let mut parts = Vec::new();
    if let Some(e) = cfg.epsilon {
        parts.push(format!("eps={e}"));
    }
    if let Some(m) = cfg.m {
        parts.push(format!("m={m}"));
    }
    if let Some(k) = cfg.n_it {
        parts.push(format!("nit={k}"));
    }
    parts.join(" ")
}

fn cmd_solve(a: &SolveArgs) -> ExitCode {
    let model = match load_model(&a.model, a.n) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let mut cfg = SolverConfig::new(a.method).seed(a.seed);
    cfg.epsilon = a.eps;
    cfg.m = a.m;
    cfg.n_it = a.nit.or(a.l);
    if let Some(b) = a.max_boxes {
        cfg = cfg.max_boxes(b);
    }
    let report = match solve(&model, &cfg) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let budget = report.budget_exceeded();
    eprintln!(
        "{} on {}: N_proc={} N_keep={} avg_iter={}",
        a.method,
        model.name(),
        report.n_proc,
        report.n_keep,
        report.avg_iter
    );
    let body = match solve_body(&model, &cfg, report, a.out.format) {
        Ok(b) => b,
        Err(e) => return fail(e),
    };
    if let Err(e) = emit(&a.out, &body) {
        return fail(e);
    }
    if budget {
        eprintln!("warning: box budget exhausted; the report holds partial results");
        return ExitCode::from(EXIT_BUDGET);
    }
    ExitCode::SUCCESS
}

fn cmd_bench(a: &BenchArgs) -> ExitCode {
    let suite = match bench::named_suite(&a.suite) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    if suite.long && !a.allow_long {
        return fail(ivsolve_core::BenchError::LongSuite(a.suite.clone()));
    }
    let suite = BenchSuite {
        cells: suite
            .cells
            .into_iter()
            .map(|c| BenchCell {
                config: {
                    let cfg = c.config.seed(a.seed);
                    match a.max_boxes {
                        Some(b) => cfg.max_boxes(b),
                        None => cfg,
                    }
                },
                ..c
            })
            .collect(),
        ..suite
    }
    .with_repetitions(a.reps, a.reps > 1);
    let report = match bench::run_suite(&suite) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    for c in &report.cells {
        eprintln!(
            "{:<4} {:<12} {:<12} N_proc={:<10} N_keep={:<10} published={}",
            c.label,
            c.report.method.name(),
            c.setting,
            c.report.n_proc,
            c.report.n_keep,
            c.published
                .map(|p| format!("{}/{}", p.n_proc, p.n_keep))
                .unwrap_or_default()
        );
    }
    let body = match suite_body(&report, a.out.format) {
        Ok(b) => b,
        Err(e) => return fail(e),
    };
    if let Err(e) = emit(&a.out, &body) {
        return fail(e);
    }
    if report.any_budget_exceeded() {
        eprintln!("warning: at least one cell exhausted its box budget");
        return ExitCode::from(EXIT_BUDGET);
    }
    ExitCode::SUCCESS
}

fn cmd_models(a: &ModelsArgs) -> ExitCode {
    if let Some(name) = &a.print {
        return match builtin(name, a.n) {
            Ok(m) => {
                print!("{}", print_system(&m));
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        };
    }
    println!("{:<12} {:>3} {:>3}  search box", "name", "n", "p");
    for name in BUILTIN_NAMES {
        if let Ok(m) = builtin(name, a.n) {
            println!("{:<12} {:>3} {:>3}  {}", name, m.n(), m.p(), m.x0());
        }
    }
    ExitCode::SUCCESS
}

fn cmd_check(a: &CheckArgs) -> ExitCode {
    round::inject_rounding_fault(a.inject_rounding_fault);
    let cfg = CheckConfig {
        seed: a.seed,
        op_trials: a.trials,
        ..CheckConfig::default()
    };
    let report = run_checks(&cfg);
    for r in &report.results {
        let verdict = if r.passed() { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {} ({} trials, {} failures)",
            r.name, r.trials, r.failures
        );
    }
    if report.all_passed() {
        return ExitCode::SUCCESS;
    }
    eprintln!("failing properties:");
    for r in report.failing() {
        eprintln!("  {}: {}", r.name, r.first_failure.as_deref().unwrap_or(""));
    }
    ExitCode::from(EXIT_INPUT)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Models(a) => cmd_models(a),
        Command::Check(a) => cmd_check(a),
    }
}
