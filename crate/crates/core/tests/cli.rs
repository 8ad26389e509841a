use std::fs;
use std::process::Command;

use fuzzy_pvalue::cli::{run, EXIT_COMPUTE, EXIT_OK, EXIT_USAGE, EXIT_VERIFY};
use fuzzy_pvalue::format::fmt17;
use serde_json::Value;

const CASE: [&str; 8] = ["-x", "4", "-m", "10", "-y", "17", "-n", "20"];

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let full = std::iter::once("fuzzy-pvalue").chain(args.iter().copied());
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn with_case(cmd: &str, extra: &[&str]) -> Vec<String> {
    std::iter::once(cmd).chain(CASE).chain(extra.iter().copied()).map(String::from).collect()
}

fn call_owned(args: &[String]) -> (i32, String, String) {
    call(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines().skip(1).map(|l| l.split(',').map(|f| f.parse().unwrap()).collect()).collect()
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn curve_has_one_row_per_grid_point_and_peaks_near_observed_difference() {
    let (code, out, err) = call_owned(&with_case("curve", &["--grid", "401"]));
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(out.lines().next(), Some("theta,mu"));
    let rows = rows(&out);
    assert_eq!(rows.len(), 401);
    let nearest = rows
        .iter()
        .min_by(|a, b| (a[0] - 0.45).abs().total_cmp(&(b[0] - 0.45).abs()))
        .unwrap();
    assert_eq!(nearest[1], 1.0);
    assert!(rows.iter().all(|r| r[1] <= 1.0));
}

#[test]
fn curve_values_use_seventeen_significant_digits() {
    let (_, out, _) = call_owned(&with_case("curve", &["--grid", "3"]));
    let line = out.lines().nth(2).unwrap();
    let (theta, mu) = line.split_once(',').unwrap();
    assert_eq!(theta, fmt17(0.0));
    let parsed: f64 = mu.parse().unwrap();
    assert_eq!(mu, fmt17(parsed));
    assert!((parsed - 0.026460416615009308).abs() < 1e-9);
}

#[test]
fn berger_boos_column_exceeds_plain_by_at_most_gamma() {
    let (code, out, _) = call_owned(&with_case("curve", &["--berger-boos", "--gamma", "1e-4", "--grid", "101"]));
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().next(), Some("theta,mu,mu_bb"));
    for r in rows(&out) {
        assert!(r[2] >= r[1] - 1e-12);
        assert!(r[2] <= r[1] + 1e-4 + 1e-6, "{r:?}");
    }
}

#[test]
fn curve_json_carries_schema_version() {
    let (code, out, _) = call_owned(&with_case("curve", &["--grid", "11", "--format", "json"]));
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["theta"].as_array().unwrap().len(), 11);
    assert_eq!(v["mu"].as_array().unwrap().len(), 11);
}

#[test]
fn demo_fuzzy_emits_both_triangles() {
    let (code, out, _) = call(&["curve", "--demo-fuzzy"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().next(), Some("u,mu_a,mu_b"));
    let rows = rows(&out);
    let at = |u: f64| rows.iter().find(|r| (r[0] - u).abs() < 1e-9).unwrap().clone();
    assert_eq!(at(10.0)[1], 1.0);
    assert!((at(9.5)[1] - 0.5).abs() < 1e-12);
    assert!((at(9.0)[2] - 0.5).abs() < 1e-12);
    assert!(rows.iter().all(|r| r[1] <= r[2] + 1e-12));
}

#[test]
fn svg_output_is_standalone() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.svg");
    let p = path.to_str().unwrap();
    let (code, _, err) = call_owned(&with_case(
        "curve",
        &["--grid", "51", "--svg", p, "--alpha", "0.05", "--h0", "0:0.2", "--berger-boos"],
    ));
    assert_eq!(code, EXIT_OK, "{err}");
    let svg = fs::read_to_string(path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("stroke-dasharray"));
    assert!(!svg.contains("href"));
}

#[test]
fn pvalue_at_observed_difference_is_one() {
    let (code, out, _) = call_owned(&with_case("pvalue", &["--h0", "0.45:0.45"]));
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["variant"], "plain");
    assert_eq!(v["p_value"].as_f64(), Some(1.0));
}

#[test]
fn pvalue_interval_matches_pinned_value() {
    let (_, out, _) = call_owned(&with_case("pvalue", &["--h0", "0:0.2"]));
    let v = json(&out);
    assert!((v["p_value"].as_f64().unwrap() - 0.2387018849231068).abs() < 1e-6);
    assert!((v["argmax_theta"].as_f64().unwrap() - 0.2).abs() < 1e-12);
}

#[test]
fn berger_boos_pvalue_adds_at_most_gamma() {
    let (_, plain, _) = call_owned(&with_case("pvalue", &["--h0", "0:0.2"]));
    let (_, bb, _) = call_owned(&with_case("pvalue", &["--h0", "0:0.2", "--berger-boos", "--gamma", "1e-4"]));
    let (p, q) = (json(&plain)["p_value"].as_f64().unwrap(), json(&bb)["p_value"].as_f64().unwrap());
    assert!(q <= p + 1e-4 + 1e-6);
    assert_eq!(json(&bb)["variant"], "berger-boos");
}

#[test]
fn confidence_sets_nest_and_contain_observed_difference() {
    let hull = |alpha: &str| {
        let (code, out, _) = call_owned(&with_case("ci", &["--alpha", alpha]));
        assert_eq!(code, EXIT_OK);
        let v = json(&out);
        (v["hull"]["lo"].as_f64().unwrap(), v["hull"]["hi"].as_f64().unwrap())
    };
    let wide = hull("0.05");
    let narrow = hull("0.5");
    assert!(wide.0 < 0.45 && 0.45 < wide.1);
    assert!(wide.0 <= narrow.0 && narrow.1 <= wide.1);
    // dense-grid oracle: (0.05, 0.725)
    assert!((wide.0 - 0.05).abs() < 1e-3 && (wide.1 - 0.725).abs() < 1e-3, "{wide:?}");
}

#[test]
fn ci_union_reports_every_piece() {
    let (_, out, _) = call_owned(&with_case("ci", &["--alpha", "0.05", "--union"]));
    let v = json(&out);
    assert_eq!(v["reported"], "union");
    assert_eq!(v["interval"], v["intervals"]);
    assert!((v["level"].as_f64().unwrap() - 0.95).abs() < 1e-15);
}

#[test]
fn verify_small_designs_pass() {
    let (code, out, _) = call(&["verify", "-m", "1", "-n", "1", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert!(v["worst_excess"].as_f64().unwrap() <= 0.0);
    assert_eq!(v["passed"], true);
    assert_eq!(call(&["verify", "-m", "3", "-n", "3"]).0, EXIT_OK);
    assert_eq!(call(&["verify", "-m", "3", "-n", "3", "--berger-boos", "--gamma", "0.01"]).0, EXIT_OK);
}

#[test]
fn verify_reports_failure_with_exit_three() {
    // without the nuisance restriction the gamma-only rule is not valid
    let (code, _, err) = call(&["verify", "-m", "2", "-n", "2", "--berger-boos", "--gamma", "0.05", "--empty-set", "gamma-only"]);
    assert_eq!(code, EXIT_VERIFY, "{err}");
    assert!(err.contains("verification failed"));
}

#[test]
fn verify_guard_needs_override() {
    let (code, _, err) = call(&["verify", "-m", "30", "-n", "30"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("guard"));
}

#[test]
fn verify_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (code, out, _) = call(&["verify", "-m", "1", "-n", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("PASS"));
    let v = json(&fs::read_to_string(path).unwrap());
    assert_eq!(v["cells"].as_array().unwrap().len(), 21 * 21 * 19);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(call(&["pvalue", "-x", "4", "-m", "10", "-y", "17", "-n", "20"]).0, EXIT_USAGE);
    assert_eq!(call_owned(&with_case("pvalue", &["--h0", "0.3"])).0, EXIT_USAGE);
    assert_eq!(call_owned(&with_case("pvalue", &["--h0", "0.3:0.1"])).0, EXIT_USAGE);
    assert_eq!(call_owned(&with_case("ci", &["--alpha", "1.5"])).0, EXIT_USAGE);
    assert_eq!(call(&["curve", "-x", "11", "-m", "10", "-y", "1", "-n", "10"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&["curve", "--grid", "many"]).0, EXIT_USAGE);
}

#[test]
fn unwritable_output_is_a_computation_error() {
    let (code, _, err) = call_owned(&with_case("curve", &["--grid", "5", "--out", "/nonexistent-dir/x.csv"]));
    assert_eq!(code, EXIT_COMPUTE);
    assert!(err.starts_with("error:"));
}

#[test]
fn help_lists_defaults_and_exits_zero() {
    let (code, out, _) = call(&["curve", "--help"]);
    assert_eq!(code, EXIT_OK);
    for default in ["401", "-0.999", "0.999", "1001", "1e-8", "201", "1e-6", "1e-4", "full-range", "csv"] {
        assert!(out.contains(&format!("[default: {default}]")), "missing default {default}");
    }
    assert_eq!(call(&["--version"]).0, EXIT_OK);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# case study\nx = 4\nm = 10\ny = 17\nn = 20\ngrid = 7\nformat = json\n").unwrap();
    let c = cfg.to_str().unwrap();

    let (code, out, err) = call(&["--config", c, "curve"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(json(&out)["mu"].as_array().unwrap().len(), 7);

    let (_, out, _) = call(&["--config", c, "curve", "--grid", "9", "--format", "csv"]);
    assert_eq!(rows(&out).len(), 9);

    fs::write(&cfg, "x = 4\nm = 10\n").unwrap();
    assert_eq!(call(&["--config", c, "curve"]).0, EXIT_USAGE);
    fs::write(&cfg, "not a setting\n").unwrap();
    assert_eq!(call(&["--config", c, "curve"]).0, EXIT_USAGE);
}

#[test]
fn output_is_identical_across_worker_counts() {
    let one = call_owned(&[vec!["--workers".into(), "1".into()], with_case("curve", &["--grid", "101"])].concat()).1;
    let four = call_owned(&[vec!["--workers".into(), "4".into()], with_case("curve", &["--grid", "101"])].concat()).1;
    assert_eq!(one, four);
}

#[test]
fn binary_runs_end_to_end() {
    let bin = env!("CARGO_BIN_EXE_fuzzy-pvalue");
    let out = Command::new(bin).args(["pvalue", "--h0", "0:0.2"]).args(CASE).output().unwrap();
    assert!(out.status.success());
    assert!(json(&String::from_utf8(out.stdout).unwrap())["p_value"].is_number());
    let bad = Command::new(bin).args(["pvalue"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    assert!(!bad.stderr.is_empty());
}
