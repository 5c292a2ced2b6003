use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn solver(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solver")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn solves_path() {
    let o = solver(&[fixture("path.gr").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "VALUE 5\n");
}

#[test]
fn k4_without_preprocessing_prints_tree() {
    let k4 = fixture("k4.stp");
    let o = solver(&["--heuristic", "zero", "--no-preprocess", k4.to_str().unwrap(), "--print-tree"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "VALUE 27\n1 2\n2 3\n2 4\n");
}

#[test]
fn every_fixture_validates() {
    let expected = [("center.stp", 9), ("diamond.stp", 2), ("k4.stp", 27), ("ntdk.gr", 8), ("path.gr", 5), ("star.gr", 9)];
    for (name, cost) in expected {
        for extra in [&[][..], &["--no-preprocess"], &["--no-prune", "--heuristic", "onetree"]] {
            let path = fixture(name);
            let mut args = vec![path.to_str().unwrap(), "--validate", "--print-tree"];
            args.extend_from_slice(extra);
            let o = solver(&args);
            assert_eq!(o.status.code(), Some(0), "{name} {extra:?}: {}", stderr(&o));
            assert!(stdout(&o).starts_with(&format!("VALUE {cost}\n")), "{name}");
            assert!(stderr(&o).contains(&format!("valid: cost {cost}")));
        }
    }
}

#[test]
fn missing_file_is_an_input_error() {
    let o = solver(&["does-not-exist.gr"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("error"));
}

#[test]
fn malformed_file_is_an_input_error() {
    let path = scratch("broken.gr");
    std::fs::write(&path, "SECTION Graph\nNodes 2\nEdges 1\nE 1 2 0\nEND\n").unwrap();
    let o = solver(&[path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn root_must_be_a_terminal() {
    let star = fixture("star.gr");
    let o = solver(&[star.to_str().unwrap(), "--root", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = solver(&[star.to_str().unwrap(), "--root", "3", "--print-tree"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "VALUE 9\n1 2\n1 3\n1 4\n");
}

#[test]
fn stats_are_json_on_stderr() {
    let o = solver(&[fixture("k4.stp").to_str().unwrap(), "--stats", "--no-preprocess"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stderr(&o).lines().find(|l| l.starts_with('{')).unwrap().to_owned();
    let v: serde_json::Value = serde_json::from_str(&line).unwrap();
    assert_eq!(v["heuristic"], "da");
    assert!(v["expansions"].as_u64().unwrap() >= 1);
    assert_eq!(stdout(&o), "VALUE 27\n");
}

#[test]
fn zero_time_limit_reports_timeout_with_incumbent() {
    let o = solver(&[fixture("k4.stp").to_str().unwrap(), "--time-limit", "0"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("TIMEOUT"));
    assert_eq!(stdout(&o), "VALUE 27\n");
}

#[test]
fn too_many_terminals_is_unsupported() {
    // star with 130 terminal leaves; preprocessing would solve it, so skip it
    let mut text = String::from("SECTION Graph\nNodes 131\nEdges 130\n");
    for v in 2..=131 {
        writeln!(text, "E 1 {v} {v}").unwrap();
    }
    text.push_str("END\nSECTION Terminals\nTerminals 130\n");
    for v in 2..=131 {
        writeln!(text, "T {v}").unwrap();
    }
    text.push_str("END\nEOF\n");
    let path = scratch("wide_star.gr");
    std::fs::write(&path, text).unwrap();
    let o = solver(&[path.to_str().unwrap(), "--no-preprocess"]);
    assert_eq!(o.status.code(), Some(3));
    let o = solver(&[path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn dump_reduced_writes_a_readable_instance() {
    let out = scratch("center_reduced.gr");
    let o = solver(&[fixture("center.stp").to_str().unwrap(), "--no-preprocess", "--dump-reduced", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("reduced:"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("SECTION Graph"));
    let o = solver(&[out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let ntdk = fixture("ntdk.gr");
    let a = solver(&[ntdk.to_str().unwrap(), "--print-tree"]);
    let b = solver(&[ntdk.to_str().unwrap(), "--print-tree"]);
    assert_eq!(a.stdout, b.stdout);
}

fn bench(args: &[&str]) -> (Option<i32>, Vec<Vec<String>>) {
    let mut full = vec!["bench"];
    full.extend_from_slice(args);
    let o = solver(&full);
    let rows = stdout(&o)
        .lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect();
    (o.status.code(), rows)
}

#[test]
fn bench_over_fixtures() {
    let dir = fixture("");
    let (code, rows) = bench(&[dir.to_str().unwrap()]);
    assert_eq!(code, Some(0));
    assert_eq!(rows[0], ["file", "status", "cost", "wall_ms", "expansions", "heuristic"]);
    assert_eq!(rows.len(), 7);
    assert!(rows[1..].iter().all(|r| r[1] == "solved"));

    // identical apart from timings
    let strip = |rows: Vec<Vec<String>>| -> Vec<Vec<String>> {
        rows.into_iter()
            .map(|mut r| {
                r.remove(3);
                r
            })
            .collect()
    };
    let (_, again) = bench(&[dir.to_str().unwrap()]);
    assert_eq!(strip(rows), strip(again));
}

#[test]
fn bench_with_zero_budget_times_out() {
    let dir = fixture("");
    let (code, rows) = bench(&[dir.to_str().unwrap(), "--budget", "0"]);
    assert_eq!(code, Some(0));
    assert_eq!(rows.len(), 7);
    assert!(rows[1..].iter().all(|r| r[1] == "timeout"));
}

#[test]
fn bench_on_missing_directory() {
    let (code, _) = bench(&["no/such/dir"]);
    assert_eq!(code, Some(2));
}
