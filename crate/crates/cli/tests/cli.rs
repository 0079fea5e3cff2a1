use std::path::PathBuf;
use std::process::{Command, Output};

use ggs::ColumnMatrix;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn ggs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ggs"))
        .args(args)
        .output()
        .expect("spawn ggs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
        .unwrap_or_else(|| panic!("no `{key}` in output:\n{text}"))
}

#[test]
fn worked_fixture_solves_in_two_iterations() {
    let a = fixture("fixture3x2.mtx");
    let b = fixture("b.txt");
    let o = ggs(&[
        "solve",
        a.to_str().unwrap(),
        "--rhs",
        b.to_str().unwrap(),
        "--method",
        "ggs",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(field(&out, "iterations"), "2");
    assert_eq!(field(&out, "stop_reason"), "GRADIENT_REACHED");
}

#[test]
fn random_consistent_solve_matches_expected_scale() {
    let o = ggs(&[
        "solve",
        "--random",
        "1000",
        "50",
        "7",
        "--consistent",
        "--method",
        "ggs",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let it: usize = field(&out, "iterations").parse().unwrap();
    assert!((100..=160).contains(&it), "IT = {it}");
    assert_eq!(field(&out, "stop_reason"), "RES_REACHED");
}

#[test]
fn stdout_is_byte_identical_across_runs() {
    for method in ["ggs", "grcd", "rgs"] {
        let args = [
            "solve",
            "--random",
            "300",
            "30",
            "5",
            "--inconsistent",
            "--method",
            method,
        ];
        let first = ggs(&args);
        let second = ggs(&args);
        assert_eq!(first.status.code(), Some(0));
        assert_eq!(first.stdout, second.stdout, "{method}");
    }
}

#[test]
fn iteration_cap_exits_two() {
    let o = ggs(&["solve", "--random", "200", "20", "1", "--max-iters", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(field(&stdout(&o), "stop_reason"), "ITERATION_CAP");
}

#[test]
fn trace_file_has_one_row_per_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let a = fixture("fixture3x2.mtx");
    let o = ggs(&[
        "solve",
        a.to_str().unwrap(),
        "--consistent",
        "--trace",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(path).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "iteration,gradient_norm_sq,res");
    let it: usize = field(&stdout(&o), "iterations").parse().unwrap();
    assert_eq!(lines.len(), it + 2);
}

#[test]
fn missing_subcommand_is_usage_error() {
    let o = ggs(&[]);
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn unknown_flag_and_bad_method_are_usage_errors() {
    assert_eq!(
        ggs(&["solve", "--random", "10", "5", "0", "--bogus"]).status.code(),
        Some(64)
    );
    assert_eq!(
        ggs(&["solve", "--random", "10", "5", "0", "--method", "sor"])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(ggs(&["solve", "--random", "5", "10", "0"]).status.code(), Some(64));
    let a = fixture("fixture3x2.mtx");
    assert_eq!(
        ggs(&["solve", a.to_str().unwrap(), "--random", "10", "5", "0"])
            .status
            .code(),
        Some(64)
    );
}

#[test]
fn missing_inputs_exit_66() {
    assert_eq!(ggs(&["bench", "/nonexistent/exp.manifest"]).status.code(), Some(66));
    assert_eq!(ggs(&["solve", "/nonexistent/a.mtx"]).status.code(), Some(66));
    assert_eq!(ggs(&["info", "/nonexistent/a.mtx"]).status.code(), Some(66));
}

#[test]
fn verify_bounds_on_worked_fixture() {
    let a = fixture("fixture3x2.mtx");
    let b = fixture("b.txt");
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.txt");
    let o = ggs(&[
        "verify-bounds",
        a.to_str().unwrap(),
        "--rhs",
        b.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(field(&out, "violations"), "0");
    assert!(out.contains("step 0: factor 0.875000"));
    assert!(out.contains("step 1: factor 0.000000"));
    assert_eq!(std::fs::read_to_string(report).unwrap(), out);
}

#[test]
fn verify_bounds_random_problem_passes() {
    let o = ggs(&["verify-bounds", "--random", "200", "20", "11", "--consistent"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "violations"), "0");
}

#[test]
fn verify_bounds_rejects_rank_deficient_and_randomized_methods() {
    let a = fixture("rank_deficient.mtx");
    let o = ggs(&["verify-bounds", a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rank deficient"));
    let o = ggs(&["verify-bounds", "--random", "20", "5", "0", "--method", "grcd"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn bench_writes_tables_and_curves() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("exp.manifest");
    let worked = fixture("fixture3x2.mtx");
    std::fs::write(
        &manifest,
        format!(
            "small random:200x20 consistent 3\nworked file:{} consistent\n",
            worked.display()
        ),
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = ggs(&[
        "bench",
        manifest.to_str().unwrap(),
        "--repeats",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("| problem | IT GGS |"));

    let table = std::fs::read_to_string(out.join("table.csv")).unwrap();
    let mut rows = csv::Reader::from_reader(table.as_bytes());
    let headers = rows.headers().unwrap().clone();
    assert_eq!(headers.len(), 7);
    let records: Vec<_> = rows.records().map(Result::unwrap).collect();
    assert_eq!(&records[0][0], "small");
    assert_eq!(&records[1][0], "worked");

    let trials = std::fs::read_to_string(out.join("trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 1 + 2 * 3 * 2);
    for name in [
        "curve_small_ggs.csv",
        "curve_small_grcd.csv",
        "curve_worked_ggs.csv",
        "bounds.csv",
    ] {
        assert!(out.join(name).exists(), "{name}");
    }
}

#[test]
fn bench_single_repeat_markdown() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("exp.manifest");
    std::fs::write(&manifest, "1000x50 random:1000x50 consistent\n").unwrap();
    let o = ggs(&[
        "bench",
        manifest.to_str().unwrap(),
        "--repeats",
        "1",
        "--format",
        "markdown",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let table = std::fs::read_to_string(dir.path().join("table.md")).unwrap();
    assert_eq!(table.lines().count(), 3);
}

#[test]
fn gen_round_trips_through_solve() {
    let dir = tempfile::tempdir().unwrap();
    let o = ggs(&[
        "gen",
        "--random",
        "60",
        "8",
        "4",
        "--inconsistent",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let a = dir.path().join("matrix.mtx");
    let b = dir.path().join("rhs.txt");
    let o = ggs(&[
        "solve",
        a.to_str().unwrap(),
        "--rhs",
        b.to_str().unwrap(),
        "--tol",
        "1e-20",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let a = ggs::problems::load_matrix_market(&a).unwrap();
    assert_eq!((a.rows(), a.cols()), (60, 8));
    let b = ggs::problems::read_vector(&b).unwrap();
    let x = ggs::problems::read_vector(dir.path().join("solution.txt")).unwrap();
    let p = ggs::LsqProblem::new(a.into(), b, None, "gen").unwrap();
    let reference = ggs::problems::reference_solution(&p).unwrap();
    for (u, v) in x.iter().zip(&reference) {
        assert!((u - v).abs() <= 1e-9 * (1.0 + v.abs()));
    }
}

#[test]
fn info_reports_shape_and_condition() {
    let o = ggs(&["info", fixture("upper2x2.mtx").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(field(&out, "rows"), "2");
    assert_eq!(field(&out, "nnz"), "3");
    assert_eq!(field(&out, "cond"), "2.62");
}
