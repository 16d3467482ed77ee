use std::fs;
use std::process::Command;

use bmcap::cli::{run, EXIT_CONFIG, EXIT_OK};
use serde_json::Value;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut full = vec!["bmcap"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn finite_example_has_twenty_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let (code, stdout, stderr) = invoke(&[
        "finite", "--kind", "holevo", "--n", "1..10", "--s", "0,0.8", "--N", "8", "--eta", "0.7", "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{stderr}");
    assert!(stdout.is_empty());
    assert!(stderr.contains("wrote 20 rows"));
    let text = fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let (header, rows) = parse_csv(&text);
    assert_eq!(header.join(","), "kind,n,s,N,eta,r_opt,y_opt,value_bits_per_mode");
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| r.len() == 8 && r.iter().all(|c| !c.is_empty())));
    let first: f64 = rows[0][7].parse().unwrap();
    assert!((first - 4.0499).abs() < 1e-4);
}

#[test]
fn heterodyne_single_mode_row() {
    let (code, stdout, _) = invoke(&["finite", "--kind", "heterodyne", "--n", "1", "--s", "0"]);
    assert_eq!(code, EXIT_OK);
    let (_, rows) = parse_csv(&stdout);
    let v: f64 = rows[0][7].parse().unwrap();
    assert!((v - 6.6f64.log2()).abs() < 1e-9);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["finite", "--kind", "all", "--n", "1..4", "--s", "0,1.6"];
    let (_, a, _) = invoke(&args);
    let (_, b, _) = invoke(&args);
    let mut with_threads = args.to_vec();
    with_threads.extend(["--threads", "3"]);
    let (_, c, _) = invoke(&with_threads);
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn csv_and_json_carry_the_same_rows() {
    let base = ["asymptotic", "--kind", "heterodyne", "--s", "0,0.8"];
    let (_, csv, _) = invoke(&base);
    let mut json_args = base.to_vec();
    json_args.extend(["--format", "json"]);
    let (code, json, _) = invoke(&json_args);
    assert_eq!(code, EXIT_OK);
    let (header, rows) = parse_csv(&csv);
    let parsed: Vec<Value> = serde_json::from_str(&json).unwrap();
    assert_eq!(parsed.len(), rows.len());
    for (row, obj) in rows.iter().zip(&parsed) {
        let keys: Vec<&String> = obj.as_object().unwrap().keys().collect();
        assert_eq!(keys, header.iter().collect::<Vec<_>>());
        for (name, cell) in header.iter().zip(row) {
            let v = &obj[name];
            match v {
                Value::Number(n) => assert_eq!(n.as_f64().unwrap(), cell.parse::<f64>().unwrap(), "{name}"),
                Value::String(s) => assert_eq!(s, cell),
                Value::Bool(b) => assert_eq!(b.to_string(), *cell),
                other => panic!("unexpected {other:?}"),
            }
        }
    }
}

#[test]
fn csv_round_trips() {
    let (_, csv, _) = invoke(&["asymptotic", "--sweep", "r", "--kind", "homodyne", "--s", "0.8", "--r-points", "7"]);
    let (_, rows) = parse_csv(&csv);
    assert_eq!(rows.len(), 7);
    for row in rows {
        for cell in &row[1..] {
            let x: f64 = cell.parse().unwrap();
            assert_eq!(&bmcap::table::format_significant(x, 12), cell);
        }
    }
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"kind": "homodyne", "n": "1..3", "s": [0, 0.8], "eta": 0.5}"#).unwrap();
    let (code, stdout, _) = invoke(&["finite", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let (_, rows) = parse_csv(&stdout);
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r[0] == "homodyne" && r[4] == "0.5"));

    let (code, stdout, _) = invoke(&["finite", "--config", cfg.to_str().unwrap(), "--eta", "0.9", "--s", "-0.8"]);
    assert_eq!(code, EXIT_OK);
    let (_, rows) = parse_csv(&stdout);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[2] == "-0.8" && r[4] == "0.9"));
}

#[test]
fn invalid_settings_exit_with_config_code() {
    for args in [
        vec!["finite", "--eta", "1.5"],
        vec!["finite", "--N", "-1"],
        vec!["finite", "--n", "0..3"],
        vec!["finite", "--s", "0.8,0"],
        vec!["finite", "--kind", "coherent"],
        vec!["asymptotic", "--sweep", "n"],
        vec!["asymptotic", "--format", "xml"],
        vec!["verify", "--n-max", "1"],
        vec!["bogus"],
    ] {
        let (code, _, err) = invoke(&args);
        assert_eq!(code, EXIT_CONFIG, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
    let (_, _, err) = invoke(&["finite", "--eta", "1.5"]);
    assert!(err.contains("eta") && !err.contains("evaluating"));
}

#[test]
fn config_file_with_bad_eta_is_rejected_before_verify_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"eta": 1.5}"#).unwrap();
    let (code, out, err) = invoke(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(out.is_empty());
    assert!(!err.contains("running"));
}

#[test]
fn verify_reports_each_check() {
    let (code, out, _) = invoke(&["verify", "--n-max", "8"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 5);
    let (code, out, _) = invoke(&["verify", "--n-max", "8", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let reports: Vec<Value> = serde_json::from_str(&out).unwrap();
    assert_eq!(reports.len(), 5);
    assert!(reports.iter().all(|r| r["passed"] == Value::Bool(true)));
}

#[test]
fn figure5_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("fig5");
    let (code, _, err) = invoke(&[
        "figure5", "--kind", "heterodyne", "--s", "0,2", "--eta", "0,1", "-o", stem.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let a = fs::read_to_string(dir.path().join("fig5_ropt.csv")).unwrap();
    let b = fs::read_to_string(dir.path().join("fig5_capacity.csv")).unwrap();
    let (ha, ra) = parse_csv(&a);
    let (hb, rb) = parse_csv(&b);
    assert_eq!(ha.join(","), "kind,s,r_opt");
    assert_eq!(hb.join(","), "eta,s,C");
    assert_eq!(ra.len(), 2);
    assert_eq!(rb.len(), 4);
    assert_eq!(ra[0][2], "0");
    assert_eq!(rb[0][2], "0");
    assert_eq!(rb[2][2], rb[3][2]);
}

#[test]
fn binary_exit_codes_and_streams() {
    let bin = env!("CARGO_BIN_EXE_bmcap");
    let ok = Command::new(bin).args(["finite", "--kind", "holevo", "--n", "1", "--s", "0"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("kind,n,s"));
    assert!(String::from_utf8_lossy(&ok.stderr).contains("evaluating"));

    let bad = Command::new(bin).args(["finite", "--eta", "1.5"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(bad.stdout.is_empty());

    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn shipped_recipes_parse_and_run() {
    let recipes = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().unwrap();
    let mut seen = 0;
    for entry in fs::read_dir(&recipes).unwrap() {
        let path = entry.unwrap().path();
        let stem = path.file_stem().unwrap().to_str().unwrap().to_string();
        let out = dir.path().join(&stem);
        let mut args = vec!["--config", path.to_str().unwrap(), "--s", "0.8", "-o", out.to_str().unwrap()];
        if stem == "figure5" {
            args.splice(0..0, ["figure5"]);
            args.extend(["--eta", "0.5"]);
        } else if stem.ends_with("_vs_n") {
            args.splice(0..0, ["finite"]);
            args.extend(["--n", "1..2"]);
        } else {
            args.splice(0..0, ["asymptotic"]);
            if stem.ends_with("_vs_r") {
                args.extend(["--r-points", "3"]);
            }
        }
        let (code, _, err) = invoke(&args);
        assert_eq!(code, EXIT_OK, "{stem}: {err}");
        seen += 1;
    }
    assert_eq!(seen, 8);
}
