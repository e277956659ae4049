use std::fs;
use std::process::{Command, Output};

use ivsolve_core::models::hill_network;
use ivsolve_core::solvers::{solve, Method, SolverConfig};
use serde_json::Value;

fn ivsolve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ivsolve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn without_last_column(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(h, _)| h).to_string())
        .collect()
}

#[test]
fn solve_newton_on_hill() {
    let o = ivsolve(&[
        "solve", "--model", "hill", "--n", "2", "--method", "newton", "--eps", "1e-3", "--nit",
        "100",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = stdout_json(&o);
    assert_eq!(doc["schema_version"], 1);
    assert!(doc["report"]["n_keep"].as_u64().unwrap() >= 1);
    assert_eq!(doc["report"]["method"], "newton");
}

#[test]
fn cli_matches_library_call() {
    let o = ivsolve(&[
        "solve", "--model", "hill", "--method", "krawczyk", "--eps", "1e-3", "--nit", "100",
    ]);
    let doc = stdout_json(&o);
    let lib = solve(
        &hill_network(2).unwrap(),
        &SolverConfig::new(Method::Krawczyk)
            .eps(1e-3)
            .iterations(100),
    )
    .unwrap();
    assert_eq!(doc["report"]["n_proc"].as_u64().unwrap(), lib.n_proc);
    assert_eq!(doc["report"]["n_keep"].as_u64().unwrap(), lib.n_keep);
    assert_eq!(
        doc["report"]["retained"].as_array().unwrap().len(),
        lib.retained.len()
    );
}

#[test]
fn single_cell_grid_processes_one_box() {
    let o = ivsolve(&[
        "solve",
        "--model",
        "hill",
        "--n",
        "2",
        "--method",
        "subdivision",
        "--m",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header = rows.headers().unwrap().clone();
    let row = rows.records().next().unwrap().unwrap();
    let col = |name: &str| &row[header.iter().position(|h| h == name).unwrap()];
    assert_eq!(col("n_proc"), "1");
    assert_eq!(col("n_keep"), "1");
    assert_eq!(header.iter().next_back(), Some("wall_time_s"));
}

#[test]
fn input_errors_exit_with_one() {
    assert_eq!(
        code(&ivsolve(&[
            "solve", "--model", "bad.path", "--method", "newton"
        ])),
        1
    );
    assert_eq!(
        code(&ivsolve(&[
            "solve", "--model", "hill", "--method", "newton"
        ])),
        1
    );
    assert_eq!(
        code(&ivsolve(&[
            "solve", "--model", "hill", "--method", "icp", "--m", "3", "--nit", "2", "--l", "2"
        ])),
        1
    );
    assert_eq!(
        code(&ivsolve(&[
            "solve", "--model", "hill", "--method", "simplex", "--eps", "0.1"
        ])),
        1
    );
    assert_eq!(code(&ivsolve(&["bench", "table42"])), 1);
    assert_eq!(code(&ivsolve(&["frobnicate"])), 1);
}

#[test]
fn long_suites_need_permission() {
    let o = ivsolve(&["bench", "table9"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--allow-long"));
}

#[test]
fn budget_exhaustion_still_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("partial.json");
    let o = ivsolve(&[
        "solve",
        "--model",
        "hill",
        "--method",
        "bisection",
        "--eps",
        "1e-3",
        "--max-boxes",
        "50",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["report"]["status"], "budget_exceeded");
}

#[test]
fn bench_reports_are_stable_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2)
        .map(|i| dir.path().join(format!("t7_{i}.csv")))
        .collect();
    for p in &paths {
        let o = ivsolve(&[
            "bench",
            "table7",
            "--format",
            "csv",
            "--output",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = fs::read_to_string(&paths[0]).unwrap();
    let b = fs::read_to_string(&paths[1]).unwrap();
    assert_eq!(without_last_column(&a), without_last_column(&b));
    assert_eq!(a.lines().count(), 6);
    assert!(a.contains("ref_n_proc"));
}

#[test]
fn bench_json_has_schema_version() {
    let o = ivsolve(&["bench", "table7", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let doc = stdout_json(&o);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["cells"].as_array().unwrap().len(), 5);
}

#[test]
fn printed_model_files_solve_like_builtins() {
    let dir = tempfile::tempdir().unwrap();
    let o = ivsolve(&["models", "--print", "hill", "--n", "3"]);
    assert_eq!(code(&o), 0);
    let path = dir.path().join("hill3.ivs");
    fs::write(&path, &o.stdout).unwrap();
    let args = |model: &str| {
        let v = [
            "solve",
            "--model",
            model,
            "--n",
            "3",
            "--method",
            "subdivision",
            "--m",
            "6",
        ];
        stdout_json(&ivsolve(&v))["report"]["n_keep"].clone()
    };
    assert_eq!(args(path.to_str().unwrap()), args("hill"));
}

#[test]
fn malformed_model_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.ivs");
    fs::write(&path, "model bad;\nstates x;\neq: (x + 1;\nX0: [0, 1];\n").unwrap();
    let o = ivsolve(&[
        "solve",
        "--model",
        path.to_str().unwrap(),
        "--method",
        "bisection",
        "--eps",
        "0.1",
    ]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn models_lists_builtins() {
    let o = ivsolve(&["models"]);
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["hill", "wta", "sqrt2", "example"] {
        assert!(text.contains(name));
    }
}

#[test]
fn check_is_deterministic_and_passes() {
    let a = ivsolve(&["check", "--seed", "7", "--trials", "2000"]);
    let b = ivsolve(&["check", "--seed", "7", "--trials", "2000"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn injected_rounding_bug_fails_containment() {
    let o = ivsolve(&["check", "--trials", "2000", "--inject-rounding-fault"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL containment/add"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("containment"));
}
