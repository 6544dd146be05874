use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fraclab_cli::config::{parse_str, RunConfig};

fn fraclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fraclab")).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let out = dir.to_str().unwrap();
    let mut all = args.to_vec();
    all.extend(["--out", out]);
    fraclab(&all)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn read_csv(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let (schema, body) = text.split_once('\n').unwrap();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (schema.to_string(), rows)
}

#[test]
fn s_out_of_range_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["solve", "--s", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("s must lie in (0,1)"), "{}", stderr(&o));
}

#[test]
fn t_above_s_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["solve", "--s", "0.4", "--t", "0.6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("t must satisfy 0 ≤ t ≤ s"), "{}", stderr(&o));
}

#[test]
fn unknown_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"problem": {"s": 0.5, "sigma": 1}}"#);
    let o = run_in(tmp.path(), &["solve", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown field `sigma`"), "{}", stderr(&o));
}

#[test]
fn solve_writes_tables_with_schema_lines() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["solve", "--svg"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in ["solution.csv", "energy.csv", "summary.csv"] {
        let (schema, rows) = read_csv(&tmp.path().join(name));
        assert!(schema.starts_with("# schema: "), "{name}: {schema}");
        assert!(!rows.is_empty(), "{name}");
    }
    let (_, energy) = read_csv(&tmp.path().join("energy.csv"));
    let e: Vec<f64> = energy.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(e.windows(2).all(|w| w[1] <= w[0]), "energy must not increase");
    assert!(tmp.path().join("energy.svg").exists());
}

#[test]
fn iteration_limit_exits_two_and_keeps_history() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["solve", "--max-iterations", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("iteration limit"), "{}", stderr(&o));
    let (_, rows) = read_csv(&tmp.path().join("energy.csv"));
    assert!(!rows.is_empty());
    assert!(!tmp.path().join("solution.csv").exists());
}

#[test]
fn sweep_reports_monotone_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["sweep"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (_, rows) = read_csv(&tmp.path().join("sweep.csv"));
    let errs: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(errs.len(), 3);
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(fs::read_to_string(tmp.path().join("sweep.svg")).unwrap().starts_with("<svg"));
    assert!(fs::read_to_string(tmp.path().join("verdict.txt")).unwrap().starts_with("PASS"));
}

#[test]
fn pointwise_fails_on_default_exponents_and_passes_at_two() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["verify", "pointwise"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("FAIL pointwise"));
    let (_, rows) = read_csv(&tmp.path().join("pointwise.csv"));
    for r in &rows {
        let p: f64 = r[0].parse().unwrap();
        let expect_fail = p > 2.0 && (r[1] == "holder" || r[1] == "down");
        assert_eq!(r[4] == "FAIL", expect_fail, "{r:?}");
    }

    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"verify": {"p_list": [2.0], "samples": 20000}}"#);
    let o = run_in(tmp.path(), &["verify", "pointwise", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, w) in [(&a, "1"), (&b, "3")] {
        let o = run_in(dir.path(), &["solve", "--workers", w]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for name in ["solution.csv", "energy.csv", "summary.csv"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert!(x == y, "{name} differs between worker counts");
    }
}

#[test]
fn run_json_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["seminorm", "--s", "0.3", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(tmp.path().join("run.json")).unwrap();
    let cfg: RunConfig = parse_str(&text).unwrap();
    assert_eq!(cfg.seed, 7);
    assert_eq!(cfg.problem.s, 0.3);
    let again = serde_json::to_string_pretty(&cfg).unwrap() + "\n";
    assert_eq!(again, text);
}

#[test]
fn seminorm_of_identity_on_unit_interval() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"problem": {"half_width": 0.5, "n": 257},
            "seminorm": {"kind": "gagliardo", "function": {"kind": "affine", "a": [1.0, 0.0], "b": 0.0},
                         "alpha": 0.5, "p": 2.0, "ball": {"radius": 0.5}}}"#,
    );
    let o = run_in(tmp.path(), &["seminorm", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (_, rows) = read_csv(&tmp.path().join("seminorm.csv"));
    let raised: f64 = rows[0][4].parse().unwrap();
    // double integral of 1 over the unit square, less the grid's half cells
    assert!((raised - 1.0).abs() < 0.01, "{raised}");
}

#[test]
fn estimate_writes_scheme_for_case_ii() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["estimate", "--s", "0.6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (_, rows) = read_csv(&tmp.path().join("scheme.csv"));
    let get = |k: &str| rows.iter().find(|r| r[0] == k).unwrap()[1].clone();
    assert_eq!(get("regime"), "case_ii");
    assert_eq!(get("i0"), "2");
    assert!((get("kappa").parse::<f64>().unwrap() - 1.2).abs() < 1e-12);
}

#[test]
fn verify_writes_report_and_verdict() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["verify", "bbm"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let verdict = fs::read_to_string(tmp.path().join("verdict.txt")).unwrap();
    assert!(verdict.starts_with("PASS bbm "), "{verdict}");
    let (_, rows) = read_csv(&tmp.path().join("bbm_report.csv"));
    assert_eq!(rows.last().unwrap()[0], "verdict");
    assert!(tmp.path().join("bbm.svg").exists());
}

#[test]
fn help_exits_zero() {
    let o = fraclab(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    for sub in ["solve", "seminorm", "estimate", "verify", "sweep", "bench"] {
        assert!(text.contains(sub), "{sub}");
    }
}
