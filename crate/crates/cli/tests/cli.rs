//! The `vexfrac` binary end to end: exit codes, artifacts, manifests.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command as Process, Output};

use serde_json::Value;
use vexfrac_cli::{load_problem, run, sha256_hex, Command, RunOptions, SolutionFile};

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_vexfrac"))
}

fn problems() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("problems")
}

fn vexfrac(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn sha256_of_known_input() {
    assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

#[test]
fn bundled_problem_files_are_admissible() {
    for name in ["reference.toml", "reference_positive.toml", "variable_order.toml"] {
        let tmp = tempfile::tempdir().unwrap();
        let spec = problems().join(name);
        let out = vexfrac(&["validate", "--spec", spec.to_str().unwrap()], tmp.path());
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json(&tmp.path().join("validation.json"));
        assert_eq!(v["report"]["admissible"], Value::Bool(true));
    }
}

#[test]
fn default_problem_matches_bundled_file() {
    let (builtin, _) = load_problem(None).unwrap();
    let (file, _) = load_problem(Some(&problems().join("reference.toml"))).unwrap();
    assert_eq!(builtin.spec.lambda, file.spec.lambda);
    assert_eq!(builtin.spec.dimension(), file.spec.dimension());
}

#[test]
fn inadmissible_problem_exits_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(problems().join("reference.toml")).unwrap().replace("p = \"2\"", "p = \"3\"");
    assert!(text.contains("p = \"3\""));
    let spec = tmp.path().join("bad.toml");
    fs::write(&spec, text).unwrap();
    let out = vexfrac(&["validate", "--spec", spec.to_str().unwrap()], &tmp.path().join("out"));
    assert_eq!(out.status.code(), Some(1));
    let v = json(&tmp.path().join("out/validation.json"));
    assert_eq!(v["report"]["admissible"], Value::Bool(false));
}

#[test]
fn parse_error_writes_error_json() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = tmp.path().join("broken.toml");
    fs::write(&spec, "dimension = 1\nomega = [[0.0, 1.0]]\ns = \"0.4 +\"\n").unwrap();
    let out = vexfrac(&["solve", "--spec", spec.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let e = json(&tmp.path().join("error.json"));
    assert_eq!(e["command"], "solve");
    assert!(!e["message"].as_str().unwrap().is_empty());
}

#[test]
fn bootstrap_without_solution_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = vexfrac(&["bootstrap"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let e = json(&tmp.path().join("error.json"));
    assert_eq!(e["kind"], "no-solution");
    assert!(e["message"].as_str().unwrap().contains("no solution input"));
}

#[test]
fn solve_then_bootstrap_from_file() {
    let tmp = tempfile::tempdir().unwrap();
    let solve_dir = tmp.path().join("solve");
    let out = vexfrac(&["solve", "--cells", "16"], &solve_dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let manifest = json(&solve_dir.join("manifest.json"));
    assert_eq!(manifest["command"], "solve");
    assert_eq!(manifest["cells"], 16);
    for name in ["solution_mp.json", "solution_min.json", "energies.csv", "solution.csv"] {
        let bytes = fs::read(solve_dir.join(name)).unwrap();
        assert_eq!(manifest["artifacts"][name], sha256_hex(&bytes), "{name}");
    }

    let mp: SolutionFile = serde_json::from_str(&fs::read_to_string(solve_dir.join("solution_mp.json")).unwrap()).unwrap();
    assert!(mp.weak_form.passed && mp.solution.energy > 0.0);
    assert_eq!(mp.solution.u.len(), 16);

    let csv = fs::read_to_string(solve_dir.join("solution.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x1,u_mp,u_min"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 16);
    // Full precision: the CSV column round-trips the JSON values exactly.
    for (row, v) in rows.iter().zip(mp.solution.u.values()) {
        assert_eq!(row[1], *v);
    }

    let boot_dir = tmp.path().join("boot");
    let sol = solve_dir.join("solution_mp.json");
    let out = vexfrac(&["bootstrap", "--cells", "16", "--solution", sol.to_str().unwrap()], &boot_dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let b = json(&boot_dir.join("bootstrap.json"));
    assert_eq!(b["bound_chain_ok"], Value::Bool(true));
    assert!(fs::read_to_string(boot_dir.join("bootstrap.csv")).unwrap().starts_with("exponent,norm\n"));

    let out = vexfrac(&["bootstrap", "--cells", "32", "--solution", sol.to_str().unwrap()], &tmp.path().join("mismatch"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_honours_lambda_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let opts = RunOptions { cells: 16, lambda_grid: Some(vec![0.02, 0.2]), out: tmp.path().to_path_buf(), ..RunOptions::default() };
    let outcome = run(Command::Sweep, &opts).unwrap();
    assert!(outcome.passed);
    let csv = fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert_eq!(outcome.manifest.lambda_grid, Some(vec![0.02, 0.2]));
    assert!(outcome.manifest.artifacts.contains_key("solution_mp.json"));
}

#[test]
fn decreasing_lambda_grid_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = vexfrac(&["sweep", "--cells", "8", "--lambda-grid", "0.5,0.1"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&tmp.path().join("error.json"))["kind"], "config");
}

#[test]
fn eigen_and_verify_write_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let out = vexfrac(&["eigen", "--cells", "16"], &tmp.path().join("eig"));
    assert!(out.status.success());
    let e = json(&tmp.path().join("eig/eigen.json"));
    assert!(e["lambda_estimate"].as_f64().unwrap() > 0.0);

    let out = vexfrac(&["verify", "--cells", "16"], &tmp.path().join("ver"));
    assert!(out.status.success());
    let v = json(&tmp.path().join("ver/inequality_report.json"));
    assert_eq!(v["violations"], 0);
    assert_eq!(v["suites"].as_array().unwrap().len(), 4);
}

#[test]
fn positive_part_problem_uses_truncated_solver() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = problems().join("reference_positive.toml");
    let out = vexfrac(&["solve", "--cells", "16", "--spec", spec.to_str().unwrap()], tmp.path());
    assert!(out.status.success());
    let lm: SolutionFile = serde_json::from_str(&fs::read_to_string(tmp.path().join("solution_min.json")).unwrap()).unwrap();
    assert!(lm.solution.u.min() >= -1e-7);
}

#[test]
fn nonpositive_tolerance_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let opts = RunOptions { tol: 0.0, out: tmp.path().to_path_buf(), ..RunOptions::default() };
    assert_eq!(run(Command::Solve, &opts).unwrap_err().kind(), "usage");
}
