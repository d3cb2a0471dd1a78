use std::process::{Command, Output};

use serde_json::Value;

fn blochlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blochlab"))
        .args(args)
        .env("BLOCHLAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

const FAST: [&str; 4] = ["--nmax", "32", "--grid", "96x48"];

fn with_fast<'a>(args: &[&'a str]) -> Vec<&'a str> {
    args.iter().copied().chain(FAST).collect()
}

#[test]
fn analyze_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let csv = dir.path().join("ratios.csv");
    let (out_s, csv_s) = (out.to_str().unwrap(), csv.to_str().unwrap());
    let res = blochlab(&with_fast(&["analyze", "--u", "1", "--phi", "(z + 0.5)/(1 + 0.5*z)", "--out", out_s, "--csv", csv_s]));
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(res.stdout.is_empty());

    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["space"], "bloch-log");
    assert_eq!(report["grid"], "96x48");
    assert_eq!(report["nmax"], 32);
    assert_eq!(report["verdict"], "bounded");
    assert!(report["band"]["Q"].as_f64().unwrap() > 0.5);
    assert_eq!(report["compact"], false);
    assert!(report["series"]["J"].as_array().unwrap().len() == 33);

    let table = std::fs::read_to_string(&csv).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("n,j_ratio,i_ratio"));
    assert!(lines.next().unwrap().ends_with(','));
    assert_eq!(table.lines().count(), 34);
}

#[test]
fn analyze_cphi_reports_zygmund_space() {
    let res = blochlab(&["analyze-cphi", "--phi", "z/2", "--nmax", "64", "--grid", "96x48"]);
    assert_eq!(res.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(report["space"], "zygmund-log");
    assert_eq!(report["compact"], true);
    assert_eq!(report["primed"]["agree"], true);
}

#[test]
fn refusals_exit_with_two() {
    let res = blochlab(&with_fast(&["analyze", "--u", "1", "--phi", "2*z"]));
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("not a self-map"));
    assert!(res.stdout.is_empty());

    let res = blochlab(&with_fast(&["analyze", "--u", "1/(z - 0.2)", "--phi", "z"]));
    assert_eq!(res.status.code(), Some(2));

    let res = blochlab(&with_fast(&["analyze", "--u", "1", "--phi", "z^^2"]));
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("column 3"));

    let res = blochlab(&["analyze", "--u", "1", "--phi", "z", "--nmax", "4"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn divergent_operator_still_writes_report() {
    let res = blochlab(&with_fast(&["analyze", "--u", "log(4/(1.0001 - z))", "--phi", "z"]));
    assert_eq!(res.status.code(), Some(2));
    let report: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(report["verdict"], "divergent");
    assert!(report["band"].is_null());
}

#[test]
fn unwritable_output_is_an_internal_error_naming_the_path() {
    let res = blochlab(&with_fast(&["analyze", "--u", "1", "--phi", "z/2", "--out", "/nonexistent-dir/r.json"]));
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("/nonexistent-dir/r.json"));
}

#[test]
fn norms_of_a_monomial() {
    let res = blochlab(&["norms", "--f", "z^2", "--weight", "wlog", "--grid", "128x64"]);
    assert_eq!(res.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(v["weight"], "wlog");
    for key in ["growth", "bloch", "bloch_seminorm", "zygmund"] {
        assert!(v[key]["value"].as_f64().unwrap() > 0.0, "{key}");
        assert_eq!(v[key]["tol"], 1e-6);
    }
    assert_eq!(v["bloch"]["value"], v["bloch_seminorm"]["value"]);
}

#[test]
fn sequence_prints_csv() {
    let res = blochlab(&["sequence", "--u", "1", "--phi", "z", "--nmax", "8", "--grid", "64x32"]);
    assert_eq!(res.status.code(), Some(0));
    let text = String::from_utf8(res.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[2], "1,0.0000000000000000e0,1.0000000000000000e0");
}

#[test]
fn verify_weights_passes() {
    let res = blochlab(&["verify", "weights", "--grid", "128x64"]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stdout));
    let text = String::from_utf8(res.stdout).unwrap();
    assert!(text.contains("[PASS]") && !text.contains("[FAIL]"));
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = with_fast(&["analyze", "--u", "exp(z)", "--phi", "(z^2 + z)/2"]);
    let a = blochlab(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_blochlab"))
        .args(&args)
        .env("BLOCHLAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
