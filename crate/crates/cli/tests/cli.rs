use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use robtnep_cli::report::{emit_table, parse_csv, parse_markdown, RunReport, TableRow, COLUMNS};
use robtnep_cli::{bench_reports, verify_bench};
use robtnep_core::ccg::{IterationRecord, Method};
use robtnep_core::ingest;
use robtnep_milp::SolverKind;

/// The two-bus toy: building the candidate is worth it, objective 1960.
const TOY: &str = r#"{
  "schema": 1,
  "buses": [{"id": 1, "slack": true}, {"id": 2}],
  "generators": [{"bus": 1, "capacity": 100, "cost": 10}],
  "demands": [{"bus": 2, "load": 80, "deviation": 16, "shed_cost": 100}],
  "lines": [{"from": 1, "to": 2, "reactance": 1, "capacity": 50, "build_cost": 1000, "existing": 1, "candidates": 1}],
  "uncertainty": {"gamma_gen": {"all": 0}, "gamma_dem": {"all": 1}},
  "config": {"budget": 1000, "sigma": 1, "capital_recovery": 1}
}"#;

/// Two regions with one generator and one demand each.
const REGIONS: &str = r#"{
  "schema": 1,
  "buses": [{"id": 1, "region": "north", "slack": true}, {"id": 2, "region": "south"}, {"id": 3, "region": "south"}],
  "generators": [{"bus": 1, "capacity": 90, "cost": 10}, {"bus": 3, "capacity": 40, "cost": 30}],
  "demands": [{"bus": 1, "load": 20, "shed_cost": 200}, {"bus": 2, "load": 60, "shed_cost": 150}],
  "lines": [
    {"from": 1, "to": 2, "reactance": 0.5, "capacity": 40, "build_cost": 500, "existing": 1, "candidates": 1},
    {"from": 2, "to": 3, "reactance": 0.5, "capacity": 40, "build_cost": 300, "existing": 0, "candidates": 1}
  ],
  "uncertainty": {"gen_dev_fraction": 0.5, "dem_dev_fraction": 0.25, "gamma_gen": {"north": 0, "south": 0}, "gamma_dem": {"north": 0, "south": 0}},
  "config": {"budget": 800, "sigma": 1, "capital_recovery": 1}
}"#;

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn rob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rob-tnep"))
        .args(args)
        .env_remove("ROB_TNEP_SOLVER")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_trace(path: &Path) -> Vec<IterationRecord> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn stats_prints_both_subproblem_sizes() {
    let out = rob(&["stats", "ieee24"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("dual: (27, 556, 370)"), "{text}");
    assert!(text.contains("kkt: (346, 757, 1397)"), "{text}");
}

#[test]
fn unknown_case_is_a_data_error() {
    let out = rob(&["solve", "nosuchcase"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nosuchcase"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(rob(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(rob(&["solve", "garver6", "--method", "simplex"]).status.code(), Some(2));
    assert_eq!(rob(&["solve", "garver6", "--epsilon", "-1"]).status.code(), Some(2));
    assert_eq!(rob(&["solve", "garver6", "--gamma-gen", "1", "--gamma-file", "x.json"]).status.code(), Some(2));
    assert_eq!(rob(&["bench", "--repeat", "0"]).status.code(), Some(2));
}

#[test]
fn budget_above_cardinality_is_a_data_error() {
    assert_eq!(rob(&["solve", "garver6", "--gamma-gen", "4"]).status.code(), Some(3));
}

#[test]
fn deterministic_garver_takes_two_iterations() {
    let dir = scratch("garver0");
    let out = rob(&["solve", "garver6", "--gamma-gen", "0", "--gamma-dem", "0", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: RunReport =
        serde_json::from_str(&fs::read_to_string(dir.join("garver6.g0-d0.result.json")).unwrap()).unwrap();
    assert_eq!(report.iterations, 2);
    let trace = read_trace(&dir.join("garver6.g0-d0.trace.jsonl"));
    assert!(report.matches_trace(&trace));
    let rows = parse_markdown(&fs::read_to_string(dir.join("garver6.g0-d0.table.md")).unwrap()).unwrap();
    assert_eq!(rows, vec![TableRow::from(&report)]);
}

#[test]
fn toy_solve_writes_consistent_artifacts() {
    let dir = scratch("toy");
    let case = dir.join("toy.json");
    fs::write(&case, TOY).unwrap();
    let out = rob(&["solve", case.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: RunReport =
        serde_json::from_str(&fs::read_to_string(dir.join("toy.g0-d1.result.json")).unwrap()).unwrap();
    assert!((report.objective - 1960.0).abs() < 1e-6);
    assert_eq!(report.built_lines, vec![2]);
    assert!(report.matches_trace(&read_trace(&dir.join("toy.g0-d1.trace.jsonl"))));

    let oracle = rob(&["oracle", case.to_str().unwrap()]);
    assert_eq!(oracle.status.code(), Some(0));
    assert!(stdout(&oracle).contains("objective 1960"), "{}", stdout(&oracle));
}

#[test]
fn kkt_method_and_external_backend_agree() {
    let dir = scratch("toy_kkt");
    let case = dir.join("toy.json");
    fs::write(&case, TOY).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rob-tnep"))
        .args(["solve", case.to_str().unwrap(), "--method", "kkt", "--out", dir.to_str().unwrap()])
        .env("ROB_TNEP_SOLVER", "external")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: RunReport =
        serde_json::from_str(&fs::read_to_string(dir.join("toy.g0-d1.result.json")).unwrap()).unwrap();
    assert_eq!(report.solver, "external");
    assert_eq!(report.method, Method::Kkt);
    assert!((report.objective - 1960.0).abs() < 1e-6);
}

#[test]
fn environment_overrides_the_solver_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_rob-tnep"))
        .args(["solve", "garver6", "--solver", "builtin"])
        .env("ROB_TNEP_SOLVER", "bogus")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ROB_TNEP_SOLVER"));
}

#[test]
fn region_budget_file_is_applied() {
    let dir = scratch("regions");
    let case = dir.join("regions.json");
    fs::write(&case, REGIONS).unwrap();
    let budgets = dir.join("budgets.json");
    fs::write(&budgets, r#"{"gamma_gen": {"north": 1, "south": 0}, "gamma_dem": {"north": 0, "south": 1}}"#).unwrap();
    let out = rob(&["solve", case.to_str().unwrap(), "--gamma-file", budgets.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let path = dir.join("regions.gnorth1_south0-dnorth0_south1.result.json");
    let report: RunReport = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(report.gamma_gen["north"], 1);
    assert_eq!(report.gamma_dem["south"], 1);

    let oracle = rob(&["oracle", case.to_str().unwrap(), "--gamma-file", budgets.to_str().unwrap()]);
    let text = stdout(&oracle);
    let line = text.lines().find(|l| l.starts_with("objective ")).unwrap();
    let exact: f64 = line["objective ".len()..].parse().unwrap();
    assert!((exact - report.objective).abs() <= 1e-6 * exact.abs().max(1.0));

    let bad = dir.join("bad.json");
    fs::write(&bad, r#"{"gamma_gen": {"north": 2}}"#).unwrap();
    assert_eq!(rob(&["solve", case.to_str().unwrap(), "--gamma-file", bad.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn convert_round_trips_builtin_cases() {
    let dir = scratch("convert");
    for name in ingest::BUILTIN_CASES {
        let path = dir.join(format!("{name}.json"));
        assert_eq!(rob(&["convert", name, path.to_str().unwrap()]).status.code(), Some(0));
        assert_eq!(ingest::parse_system(&path).unwrap(), ingest::builtin_case(name).unwrap());
    }
}

#[test]
fn oracle_refuses_large_cases() {
    let out = rob(&["oracle", "garver6"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn bench_output_round_trips() {
    let dir = scratch("bench");
    let out = rob(&["bench", "--budgets", "0:0,1:2", "--repeat", "2", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let reports: Vec<RunReport> =
        serde_json::from_str(&fs::read_to_string(dir.join("bench.reports.json")).unwrap()).unwrap();
    assert_eq!(reports.len(), 2);
    assert!(reports.iter().all(|r| r.seconds.len() == 2));
    verify_bench(&dir, &reports).unwrap();
    let rows: Vec<TableRow> = reports.iter().map(TableRow::from).collect();
    assert_eq!(parse_markdown(&stdout(&out)).unwrap(), rows);
}

#[test]
fn table_shapes() {
    let toy = ingest::parse_bytes(TOY.as_bytes()).unwrap();
    let grid = |_: &robtnep_core::model::Network| vec![(0, 0), (0, 1)];
    let reports = bench_reports(&[toy], &grid, 1, Method::Dual, SolverKind::Builtin, 1).unwrap();

    let one = emit_table(&reports[..1]).unwrap();
    let lines: Vec<&str> = one.markdown.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[2].trim_matches('|').split('|').count(), COLUMNS.len());
    assert_eq!(COLUMNS.len(), 6);

    let two = emit_table(&reports).unwrap();
    let rows = parse_csv(&two.csv).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].budgets, "G=0 D=0");
    assert_eq!(rows[1].budgets, "G=0 D=1");
    assert!(rows[0].objective <= rows[1].objective);
    assert!(emit_table(&[]).is_err());
}
