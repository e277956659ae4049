//! Experiment harness: named reproduction suites, cost-model predictions
//! and machine-readable reports.
//!
//! CSV column order is fixed and documented in [`CSV_HEADER`]; the wall
//! time is always the last column so that runs can be compared byte for
//! byte after dropping it.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::counters::{CostConvention, OpCounters};
use crate::error::BenchError;
use crate::ibox::IntervalBox;
use crate::interval::Interval;
use crate::linalg::{self, IntervalMatrix};
use crate::model::SystemModel;
use crate::models::{hill_network, wta_network};
use crate::solvers::{solve, Method, RunReport, SolverConfig};

/// Version tag of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Iteration cap used by the Newton and Krawczyk cells of the named suites.
pub const SUITE_NEWTON_ITERATIONS: u32 = 100;

/// Inputs of the worst-case cost formulas.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostModelInputs {
    pub method: Method,
    pub n: usize,
    pub vol_x0: f64,
    pub epsilon: Option<f64>,
    pub m: Option<usize>,
    pub n_it: Option<u32>,
    /// Cost of one elementary operation.
    pub c: f64,
    /// Elementary operations in one evaluation of `f`.
    pub k: u64,
}

impl CostModelInputs {
    /// Inputs for a concrete run, with `c = 1` and `k` under the uniform
    /// convention.
    pub fn for_run(model: &SystemModel, cfg: &SolverConfig) -> CostModelInputs {
        CostModelInputs {
            method: cfg.method,
            n: model.n(),
            vol_x0: model.x0().volume(),
            epsilon: cfg.epsilon,
            m: cfg.m,
            n_it: cfg.n_it,
            c: 1.0,
            k: model.op_count(CostConvention::Uniform),
        }
    }
}

/// Evaluates the worst-case workload formula of the chosen method.
///
/// With `C_F = c·k`, `C_J = c·k·n²`, `C_J⁻¹ = c·n³` and `C_con = C_F`:
///
/// | method | prediction |
/// |---|---|
/// | bisection | `(C_F + n) Vol / εⁿ` |
/// | subdivision + filter | `mⁿ C_F` |
/// | constraint propagation | `mⁿ N_it (C_con + n)` |
/// | Newton | `N_it (C_F + C_J + C_J⁻¹) Vol / εⁿ` |
/// | Krawczyk | `N_it (C_F + C_J + c n³) Vol / εⁿ` |
///
/// The value is a scale for an upper bound, not a runtime.
pub fn predict_workload(ci: &CostModelInputs) -> Result<f64, BenchError> {
    let n = ci.n as f64;
    let c_f = ci.c * ci.k as f64;
    let c_j = c_f * n * n;
    let c_inv = ci.c * n.powi(3);
    let eps = || ci.epsilon.ok_or(BenchError::MissingParameter("epsilon"));
    let m = || {
        ci.m.map(|m| m as f64)
            .ok_or(BenchError::MissingParameter("m"))
    };
    let n_it = || {
        ci.n_it
            .map(f64::from)
            .ok_or(BenchError::MissingParameter("n_it"))
    };
    let cells = |eps: f64| ci.vol_x0 / eps.powi(ci.n as i32);
    Ok(match ci.method {
        Method::Bisection => (c_f + n) * cells(eps()?),
        Method::SubdivisionFilter => m()?.powi(ci.n as i32) * c_f,
        Method::Icp => m()?.powi(ci.n as i32) * n_it()? * (c_f + n),
        Method::Newton => n_it()? * (c_f + c_j + c_inv) * cells(eps()?),
        Method::Krawczyk => n_it()? * (c_f + c_j + ci.c * n.powi(3)) * cells(eps()?),
    })
}

/// Measured work in the units of [`predict_workload`]: interval-level
/// operations plus `n` comparisons per box-diameter test.
pub fn measured_work(report: &RunReport) -> u64 {
    report.counters.interval_ops(CostConvention::Uniform)
        + report.n as u64 * report.counters.box_diams
}

/// Reference figures for one published cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PublishedRef {
    pub n_proc: u64,
    pub n_keep: u64,
    pub avg_iter: Option<f64>,
    pub time_s: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchCell {
    /// Column label, such as the search-region name.
    pub label: String,
    /// Human-readable setting, such as `eps=0.001`.
    pub setting: String,
    pub model: SystemModel,
    pub config: SolverConfig,
    pub published: Option<PublishedRef>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchSuite {
    pub name: String,
    pub cells: Vec<BenchCell>,
    /// Timed repetitions per cell, at least one.
    pub repetitions: usize,
    /// Run one untimed repetition first.
    pub warmup: bool,
    /// Long-running suites are skipped unless explicitly allowed.
    pub long: bool,
}

impl BenchSuite {
    pub fn new(name: impl Into<String>) -> BenchSuite {
        BenchSuite {
            name: name.into(),
            cells: Vec::new(),
            repetitions: 1,
            warmup: false,
            long: false,
        }
    }

    pub fn with_repetitions(mut self, repetitions: usize, warmup: bool) -> BenchSuite {
        self.repetitions = repetitions;
        self.warmup = warmup;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellResult {
    pub label: String,
    pub setting: String,
    pub report: RunReport,
    pub predicted_work: f64,
    pub measured_work: u64,
    /// `measured_work / predicted_work`.
    pub work_ratio: f64,
    pub published: Option<PublishedRef>,
    /// Median over the timed repetitions.
    pub wall_time_s: f64,
}

impl CellResult {
    pub fn n_proc_ratio(&self) -> Option<f64> {
        self.published
            .map(|p| self.report.n_proc as f64 / p.n_proc as f64)
    }

    pub fn n_keep_ratio(&self) -> Option<f64> {
        self.published
            .filter(|p| p.n_keep > 0)
            .map(|p| self.report.n_keep as f64 / p.n_keep as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub suite: String,
    pub repetitions: usize,
    pub cells: Vec<CellResult>,
}

impl SuiteReport {
    pub fn any_budget_exceeded(&self) -> bool {
        self.cells.iter().any(|c| c.report.budget_exceeded())
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let h = v.len() / 2;
    if v.len() % 2 == 1 {
        v[h]
    } else {
        0.5 * (v[h - 1] + v[h])
    }
}

/// Runs every cell in order. A cell that exhausts its box budget is
/// reported with its partial counts; the suite continues.
pub fn run_suite(s: &BenchSuite) -> Result<SuiteReport, BenchError> {
    if s.repetitions == 0 {
        return Err(BenchError::InvalidParameter(
            "repetitions must be at least 1".into(),
        ));
    }
    let mut cells = Vec::with_capacity(s.cells.len());
    for cell in &s.cells {
        cell.config.validate()?;
        if s.warmup {
            solve(&cell.model, &cell.config)?;
        }
        let mut times = Vec::with_capacity(s.repetitions);
        let mut report = None;
        for _ in 0..s.repetitions {
            let r = solve(&cell.model, &cell.config)?;
            times.push(r.wall_time_s);
            report = Some(r);
        }
        let report = report.expect("at least one repetition");
        let predicted = predict_workload(&CostModelInputs::for_run(&cell.model, &cell.config))?;
        let measured = measured_work(&report);
        cells.push(CellResult {
            label: cell.label.clone(),
            setting: cell.setting.clone(),
            predicted_work: predicted,
            measured_work: measured,
            work_ratio: measured as f64 / predicted,
            published: cell.published,
            wall_time_s: median(times),
            report,
        });
    }
    Ok(SuiteReport {
        schema_version: SCHEMA_VERSION,
        suite: s.name.clone(),
        repetitions: s.repetitions,
        cells,
    })
}

/// Names accepted by [`named_suite`].
pub const SUITE_NAMES: [&str; 6] = ["table4", "table5", "table6", "table7", "table8", "table9"];

fn published(n_proc: u64, n_keep: u64, avg_iter: Option<f64>, time_s: f64) -> Option<PublishedRef> {
    Some(PublishedRef {
        n_proc,
        n_keep,
        avg_iter,
        time_s,
    })
}

struct Settings {
    eps_bisection: f64,
    sf_m: usize,
    icp_m: usize,
    icp_l: u32,
    eps_newton: f64,
}

fn method_cells(
    label: &str,
    model: &SystemModel,
    s: &Settings,
    refs: [Option<PublishedRef>; 5],
    store: bool,
) -> Vec<BenchCell> {
    let configs = [
        (
            format!("eps={}", s.eps_bisection),
            SolverConfig::new(Method::Bisection).eps(s.eps_bisection),
        ),
        (
            format!("m={}", s.sf_m),
            SolverConfig::new(Method::SubdivisionFilter).grid(s.sf_m),
        ),
        (
            format!("m={} l={}", s.icp_m, s.icp_l),
            SolverConfig::new(Method::Icp)
                .grid(s.icp_m)
                .iterations(s.icp_l),
        ),
        (
            format!("eps={}", s.eps_newton),
            SolverConfig::new(Method::Newton)
                .eps(s.eps_newton)
                .iterations(SUITE_NEWTON_ITERATIONS),
        ),
        (
            format!("eps={}", s.eps_newton),
            SolverConfig::new(Method::Krawczyk)
                .eps(s.eps_newton)
                .iterations(SUITE_NEWTON_ITERATIONS),
        ),
    ];
    configs
        .into_iter()
        .zip(refs)
        .map(|((setting, config), published)| BenchCell {
            label: label.to_string(),
            setting,
            model: model.clone(),
            config: config.store_retained(store),
            published,
        })
        .collect()
}

fn built(m: Result<SystemModel, crate::error::ModelError>) -> SystemModel {
    m.expect("built-in model is well formed")
}

/// The reproduction suite with the given name.
pub fn named_suite(name: &str) -> Result<BenchSuite, BenchError> {
    let mut suite = BenchSuite::new(name);
    match name {
        "table4" => {
            let s = Settings {
                eps_bisection: 1e-3,
                sf_m: 100,
                icp_m: 50,
                icp_l: 5,
                eps_newton: 1e-3,
            };
            let hill = built(hill_network(2));
            let v1 = built(hill.with_x0(IntervalBox::cube(0.0, 10.0, 2)));
            let v2 = built(hill.with_x0(IntervalBox::cube(0.0, 20.0, 2)));
            let r1 = [
                published(485497, 235585, None, 4.7),
                published(10000, 43, None, 0.095),
                published(2500, 11, Some(1.02), 0.033),
                published(103, 5, Some(2.22), 0.003),
                published(103, 5, Some(4.22), 0.004),
            ];
            let r2 = [
                published(494709, 240289, None, 4.8),
                published(10000, 13, None, 0.095),
                published(2500, 7, Some(1.02), 0.035),
                published(119, 7, Some(2.60), 0.0035),
                published(119, 7, Some(4.60), 0.0045),
            ];
            let c1 = method_cells("V1", &v1, &s, r1, true);
            let c2 = method_cells("V2", &v2, &s, r2, true);
            for (a, b) in c1.into_iter().zip(c2) {
                suite.cells.push(a);
                suite.cells.push(b);
            }
        }
        "table5" => {
            let s = Settings {
                eps_bisection: 1e-2,
                sf_m: 5,
                icp_m: 5,
                icp_l: 5,
                eps_newton: 1e-2,
            };
            let refs = [
                published(13771, 3774, None, 0.4),
                published(3125, 31, None, 0.063),
                published(3125, 1, Some(1.0), 0.12),
                published(1361, 1, Some(1.33), 0.21),
                published(1361, 1, Some(9.4), 0.42),
            ];
            suite.cells = method_cells("X0", &built(hill_network(5)), &s, refs, true);
        }
        "table6" => {
            let s = Settings {
                eps_bisection: 1e-1,
                sf_m: 5,
                icp_m: 5,
                icp_l: 5,
                eps_newton: 1e-2,
            };
            let refs = [
                published(5749985, 322103, None, 1476.6551),
                published(9765625, 1025, None, 340.5),
                published(9765625, 3, Some(1.0), 729.0),
                published(330277, 50, Some(1.075), 102.62),
                published(330277, 3, Some(2.0), 109.5),
            ];
            suite.cells = method_cells("X0", &built(hill_network(10)), &s, refs, false);
            suite.long = true;
        }
        "table7" => {
            let s = Settings {
                eps_bisection: 0.02,
                sf_m: 10,
                icp_m: 5,
                icp_l: 5,
                eps_newton: 0.02,
            };
            let refs = [
                published(123, 9, None, 0.0005),
                published(100, 9, None, 0.0004),
                published(25, 3, Some(1.12), 0.0003),
                published(65, 4, Some(1.0), 0.0010),
                published(65, 4, Some(7.75), 0.0026),
            ];
            suite.cells = method_cells("X0", &built(wta_network(2)), &s, refs, true);
        }
        "table8" => {
            let s = Settings {
                eps_bisection: 0.02,
                sf_m: 10,
                icp_m: 10,
                icp_l: 10,
                eps_newton: 0.02,
            };
            let refs = [
                published(19458141, 7882977, None, 137.8984),
                published(100000, 323, None, 0.7166),
                published(100000, 243, Some(1.0), 35.8382),
                published(19457249, 7882977, Some(1.0), 523.6390),
                published(19457249, 7882977, Some(96.2), 449.2722),
            ];
            suite.cells = method_cells("X0", &built(wta_network(5)), &s, refs, false);
        }
        "table9" => {
            let s = Settings {
                eps_bisection: 0.2,
                sf_m: 5,
                icp_m: 5,
                icp_l: 5,
                eps_newton: 0.2,
            };
            let refs = [
                published(87640737, 25887072, None, 1342.3153),
                published(9765625, 10449, None, 87.3882),
                published(9765625, 1024, Some(1.0), 638.7728),
                published(87640737, 25887072, Some(0.0), 4043.2741),
                published(87640737, 25887072, Some(0.0), 4149.7953),
            ];
            suite.cells = method_cells("X0", &built(wta_network(10)), &s, refs, false);
            suite.long = true;
        }
        other => return Err(BenchError::UnknownSuite(other.to_string())),
    }
    Ok(suite)
}

/// Columns of the CSV report, in order.
pub const CSV_HEADER: [&str; 28] = [
    "suite",
    "cell",
    "method",
    "model",
    "n",
    "setting",
    "status",
    "n_proc",
    "n_keep",
    "avg_iter",
    "total_iter",
    "peak_worklist",
    "f_evals",
    "j_evals",
    "inversions",
    "contractor_calls",
    "interval_ops",
    "real_ops",
    "extended_divs",
    "predicted_work",
    "measured_work",
    "work_ratio",
    "ref_n_proc",
    "ref_n_keep",
    "ref_avg_iter",
    "n_proc_ratio",
    "n_keep_ratio",
    "wall_time_s",
];

fn opt(v: Option<impl ToString>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn counter_fields(c: &OpCounters) -> [String; 7] {
    [
        c.f_evals.to_string(),
        c.j_evals.to_string(),
        c.inversions.to_string(),
        c.contractor_calls.to_string(),
        c.interval_ops(CostConvention::Uniform).to_string(),
        c.real_ops().to_string(),
        c.extended_divs.to_string(),
    ]
}

/// Writes one CSV row per cell, headed by [`CSV_HEADER`].
pub fn write_csv<W: Write>(report: &SuiteReport, out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for cell in &report.cells {
        let r = &cell.report;
        let mut row = vec![
            report.suite.clone(),
            cell.label.clone(),
            r.method.to_string(),
            r.model.clone(),
            r.n.to_string(),
            cell.setting.clone(),
            status_name(r).to_string(),
            r.n_proc.to_string(),
            r.n_keep.to_string(),
            r.avg_iter.to_string(),
            r.total_iter.to_string(),
            r.peak_worklist.to_string(),
        ];
        row.extend(counter_fields(&r.counters));
        row.extend([
            cell.predicted_work.to_string(),
            cell.measured_work.to_string(),
            cell.work_ratio.to_string(),
            opt(cell.published.map(|p| p.n_proc)),
            opt(cell.published.map(|p| p.n_keep)),
            opt(cell.published.and_then(|p| p.avg_iter)),
            opt(cell.n_proc_ratio()),
            opt(cell.n_keep_ratio()),
            cell.wall_time_s.to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// CSV report as a string.
pub fn csv_string(report: &SuiteReport) -> Result<String, BenchError> {
    let mut buf = Vec::new();
    write_csv(report, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

fn status_name(r: &RunReport) -> &'static str {
    if r.budget_exceeded() {
        "budget_exceeded"
    } else {
        "complete"
    }
}

/// Pretty JSON report. Retained boxes are left out of suite reports.
pub fn json_string(report: &SuiteReport) -> Result<String, BenchError> {
    let mut slim = report.clone();
    for c in &mut slim.cells {
        c.report.retained.clear();
    }
    Ok(serde_json::to_string_pretty(&slim)?)
}

/// One row of the Laplace growth table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    pub measured_muls: u64,
    pub expected_muls: u64,
}

/// Random interval matrix with entries around `[-1, 1]`.
pub fn random_interval_matrix(rng: &mut ChaCha8Rng, n: usize) -> IntervalMatrix {
    let entries = (0..n * n)
        .map(|_| {
            let c: f64 = rng.gen_range(-1.0..1.0);
            let r: f64 = rng.gen_range(0.0..0.1);
            Interval::new(c - r, c + r)
        })
        .collect();
    IntervalMatrix::from_entries(n, entries)
}

/// Runs `det_laplace` on random matrices for `n = 1..=max_n` and records
/// the interval-multiplication counts next to `M(n) = n (M(n−1) + 1)`.
pub fn factorial_growth_check(max_n: usize, seed: u64) -> Result<Vec<GrowthRow>, BenchError> {
    if max_n > 7 {
        return Err(BenchError::InvalidParameter(format!(
            "max_n must be at most 7, got {max_n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut expected = 0u64;
    let mut rows = Vec::with_capacity(max_n);
    for n in 1..=max_n {
        if n > 1 {
            expected = n as u64 * (expected + 1);
        }
        let a = random_interval_matrix(&mut rng, n);
        let mut c = OpCounters::new();
        linalg::det_laplace(&a, &mut c).map_err(|e| BenchError::InvalidParameter(e.to_string()))?;
        rows.push(GrowthRow {
            n,
            measured_muls: c.iv_mul,
            expected_muls: expected,
        });
    }
    Ok(rows)
}

/// Interval multiplications performed by `det_gauss` on a diagonally
/// dominant random matrix of each size.
pub fn gauss_growth(sizes: &[usize], seed: u64) -> Vec<(usize, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sizes
        .iter()
        .map(|&n| {
            let mut a = random_interval_matrix(&mut rng, n);
            for i in 0..n {
                let d = a.get(i, i);
                a.set(i, i, d + Interval::point(2.0 * n as f64));
            }
            let mut c = OpCounters::new();
            let _ = linalg::det_gauss(&a, &mut c);
            (n, c.iv_mul)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(method: Method) -> CostModelInputs {
        CostModelInputs {
            method,
            n: 2,
            vol_x0: 100.0,
            epsilon: Some(1.0),
            m: Some(100),
            n_it: Some(1),
            c: 1.0,
            k: 3,
        }
    }

    #[test]
    fn cost_formulas() {
        assert_eq!(
            predict_workload(&inputs(Method::SubdivisionFilter)).unwrap(),
            30000.0
        );
        assert_eq!(predict_workload(&inputs(Method::Bisection)).unwrap(), 500.0);
        let newton = CostModelInputs {
            n: 1,
            vol_x0: 2.0,
            epsilon: Some(0.5),
            ..inputs(Method::Newton)
        };
        // (3 + 3 + 1) * 2 / 0.5
        assert_eq!(predict_workload(&newton).unwrap(), 28.0);
        let missing = CostModelInputs {
            epsilon: None,
            ..inputs(Method::Bisection)
        };
        assert!(matches!(
            predict_workload(&missing),
            Err(BenchError::MissingParameter("epsilon"))
        ));
    }

    #[test]
    fn empty_suite_gives_empty_report() {
        let r = run_suite(&BenchSuite::new("empty")).unwrap();
        assert!(r.cells.is_empty());
        assert_eq!(csv_string(&r).unwrap().lines().count(), 1);
    }

    #[test]
    fn growth_rows_follow_recurrence() {
        let rows = factorial_growth_check(7, 1).unwrap();
        assert_eq!(rows[1].measured_muls, 2);
        assert_eq!(rows[3].measured_muls, 40);
        assert!(rows.iter().all(|r| r.measured_muls == r.expected_muls));
        assert!(factorial_growth_check(8, 1).is_err());
    }

    #[test]
    fn suite_layouts() {
        assert_eq!(named_suite("table4").unwrap().cells.len(), 10);
        for name in SUITE_NAMES {
            let s = named_suite(name).unwrap();
            assert_eq!(s.long, name == "table6" || name == "table9");
        }
        assert!(matches!(
            named_suite("table3"),
            Err(BenchError::UnknownSuite(_))
        ));
    }

    #[test]
    fn table7_runs_and_reports() {
        let r = run_suite(&named_suite("table7").unwrap()).unwrap();
        assert_eq!(r.cells.len(), 5);
        assert_eq!(r.cells[1].report.n_proc, 100);
        assert_eq!(r.cells[2].report.n_proc, 25);
        let csv = csv_string(&r).unwrap();
        assert!(csv.starts_with("suite,cell,method"));
        let json: serde_json::Value = serde_json::from_str(&json_string(&r).unwrap()).unwrap();
        assert_eq!(json["schema_version"], 1);
    }
}
