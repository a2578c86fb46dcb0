//! End-to-end runs of the `rpod` binary.

use rpod_cli::calibrate::CalibrationSummary;
use rpod_cli::detect::DetectionReport;
use rpod_cli::simulate::CellOutcome;
use std::path::Path;
use std::process::{Command, Output};

fn rpod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rpod")).args(args).output().expect("rpod binary")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_gaussian_csv(path: &Path, n: usize, d: usize, seed: u64, header: bool, edit: impl Fn(usize, usize, f64) -> f64) {
    let m = rpod::simulation::standard_normal_matrix(&mut rpod::rng::from_seed(seed), n, d);
    let mut text = String::new();
    if header {
        text.push_str(&(0..d).map(|j| format!("x{j}")).collect::<Vec<_>>().join(","));
        text.push('\n');
    }
    for i in 0..n {
        let row: Vec<String> = (0..d).map(|j| format!("{}", edit(i, j, m.row(i)[j]))).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn invalid_target_is_a_usage_error() {
    let o = rpod(&["calibrate", "--n", "50", "--d", "50", "--target-projections", "0.5"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn conflicting_flags_rejected() {
    let o = rpod(&["detect", "--input", "x.csv", "--constants-file", "c.json", "--a", "0.1", "--b", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = rpod(&["detect", "--input", "x.csv", "--a", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn calibration_is_cached() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("cache");
    let out = tmp.path().join("summary.json");
    let args = [
        "calibrate", "--n", "20", "--d", "5", "--target-projections", "10", "--mc-size", "20000", "--level-reps", "2000",
        "--seed", "3", "--cache-dir", path(&cache), "--output", path(&out),
    ];
    let first = rpod(&args);
    assert!(first.status.success(), "{}", stderr(&first));
    let s1: CalibrationSummary = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert!(!s1.from_cache);
    assert_eq!(s1.key.seed, 3);

    let second = rpod(&args);
    assert!(second.status.success());
    let s2: CalibrationSummary = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert!(s2.from_cache);
    assert_eq!((s1.constants.a, s1.constants.b), (s2.constants.a, s2.constants.b));
    assert!(!stderr(&second).contains("calibrated in"));

    let mut forced = args.to_vec();
    forced.push("--force");
    let third = rpod(&forced);
    assert!(third.status.success());
    let s3: CalibrationSummary = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert!(!s3.from_cache);
    assert_eq!((s1.constants.a, s1.constants.b), (s3.constants.a, s3.constants.b));

    let entries: serde_json::Value = serde_json::from_slice(&std::fs::read(cache.join("calibration-cache.json")).unwrap()).unwrap();
    let e = &entries.as_array().unwrap()[0];
    assert_eq!(entries.as_array().unwrap().len(), 1);
    for k in ["n", "d", "delta", "alpha", "h", "N", "seed"] {
        assert!(e["key"].get(k).is_some(), "{k}");
    }
    for k in ["a", "b", "estimated_level", "mean_projections", "timestamp"] {
        assert!(e["value"].get(k).is_some(), "{k}");
    }
}

#[test]
fn unwritable_cache_is_fatal() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let o = rpod(&[
        "calibrate", "--n", "10", "--d", "3", "--target-projections", "5", "--mc-size", "2000", "--level-reps", "500",
        "--cache-dir", path(&blocker.join("sub")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("calibration cache"), "{}", stderr(&o));
}

#[test]
fn calibrate_fifty_by_fifty() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s.json");
    let o = rpod(&["calibrate", "--n", "50", "--d", "50", "--seed", "11", "--cache-dir", path(tmp.path()), "--output", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s: CalibrationSummary = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert!((s.constants.a - 0.033).abs() <= 0.003, "{}", s.constants.a);
    assert!((s.constants.b - 4.97).abs() <= 0.08, "{}", s.constants.b);
    let printed = String::from_utf8_lossy(&o.stdout);
    assert!(printed.contains(&format!("{:.4}", s.constants.b)));
}

#[test]
fn detect_finds_a_gross_outlier_and_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("wide.csv");
    // row 37 is shifted far out, column 4 is constant
    write_gaussian_csv(&csv, 40, 397, 5, true, |i, j, x| {
        if j == 4 {
            2.5
        } else if i == 36 {
            x + 5.0
        } else {
            x
        }
    });
    let cache = tmp.path().join("cache");
    let cal = rpod(&[
        "calibrate", "--n", "40", "--d", "397", "--mc-size", "20000", "--level-reps", "2000", "--cache-dir", path(&cache),
    ]);
    assert!(cal.status.success(), "{}", stderr(&cal));

    let out = tmp.path().join("report.json");
    let o = rpod(&["detect", "--input", path(&csv), "--T", "100", "--cache-dir", path(&cache), "--seed", "9", "--output", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: DetectionReport = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!((report.dataset.n, report.dataset.d), (40, 397));
    assert_eq!(report.dataset.sha256.len(), 64);
    assert_eq!(report.seed, 9);
    assert_eq!(report.constants.provenance.source, "cache");
    assert!(report.proportions[36] >= 0.95, "{:?}", report.proportions);
    assert!(report.declared_rows.contains(&37));
    assert_eq!(report.recompute_declared(), report.declared_rows);
    assert_eq!(report.threshold, 5);

    let text = serde_json::to_string(&report).unwrap();
    let back: DetectionReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
}

#[test]
fn detect_with_reference_constants_and_strengthened_vote() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("s.csv");
    write_gaussian_csv(&csv, 50, 50, 6, false, |i, _, x| if i == 0 { 4.0 * x } else { x });
    let out = tmp.path().join("r.json");
    let o = rpod(&[
        "detect", "--input", path(&csv), "--T", "40", "--vote-mode", "strengthened", "--cache-dir", path(tmp.path()), "--output", path(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: DetectionReport = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(report.constants.provenance.source, "reference");
    assert_eq!(report.runs, 40);
    assert!(report.declared_rows.contains(&1));
}

#[test]
fn bad_inputs_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(rpod(&["detect", "--input", path(&empty), "--a", "0.03", "--b", "5"]).status.code(), Some(2));

    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "u,v\n1,2\n3,oops\n").unwrap();
    let o = rpod(&["detect", "--input", path(&bad), "--a", "0.03", "--b", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3, column 2"), "{}", stderr(&o));

    let missing = tmp.path().join("nope.csv");
    assert_eq!(rpod(&["detect", "--input", path(&missing), "--a", "0.03", "--b", "5"]).status.code(), Some(2));

    let csv = tmp.path().join("ok.csv");
    write_gaussian_csv(&csv, 20, 4, 1, false, |_, _, x| x);
    let constants = tmp.path().join("c.json");
    let c = rpod::DetectorConstants::new(0.03, 5.0, 50, 50, 0.05, 0.05, 50.0).unwrap();
    std::fs::write(&constants, serde_json::to_string(&c).unwrap()).unwrap();
    let o = rpod(&["detect", "--input", path(&csv), "--constants-file", path(&constants)]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    // no table entry and nothing cached
    let o = rpod(&["detect", "--input", path(&csv), "--cache-dir", path(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_preset_is_a_usage_error() {
    assert_eq!(rpod(&["simulate", "--paper-table", "8"]).status.code(), Some(2));
    assert_eq!(rpod(&["simulate", "--covariance", "banana"]).status.code(), Some(2));
}

fn cells(dir: &Path) -> Vec<CellOutcome> {
    let mut names: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    names.sort();
    names.iter().map(|p| serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()).collect()
}

#[test]
fn level_preset_at_desk_scale() {
    let tmp = tempfile::tempdir().unwrap();
    let o = rpod(&["simulate", "--paper-table", "5", "--scale", "desk", "--seed", "12", "--output", path(tmp.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let cells = cells(tmp.path());
    assert_eq!(cells.len(), 30);
    let identity = cells
        .iter()
        .filter_map(|c| c.report.as_ref())
        .find(|r| r.config.covariance.kind == rpod::simulation::CovarianceKind::Identity && r.config.d == 50 && r.config.constants.h == 50.0)
        .unwrap();
    assert_eq!(identity.completed_reps, 1000);
    assert!((0.035..=0.065).contains(&identity.rejection_proportion), "{}", identity.rejection_proportion);
    let table = std::fs::read_to_string(tmp.path().join("table.txt")).unwrap();
    assert_eq!(table.lines().count(), 32);
}

#[test]
fn power_cell() {
    let tmp = tempfile::tempdir().unwrap();
    let o = rpod(&["simulate", "--n", "50", "--d", "50", "--radius", "2", "--reps", "1000", "--seed", "13", "--output", path(tmp.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = cells(tmp.path())[0].report.clone().unwrap();
    assert!((r.rejection_proportion - 0.88).abs() <= 0.04, "{}", r.rejection_proportion);
}

#[test]
fn thread_count_does_not_change_results() {
    let tmp = tempfile::tempdir().unwrap();
    let (x, y) = (tmp.path().join("x"), tmp.path().join("y"));
    let base = ["simulate", "--experiment", "contamination", "--n", "50", "--d", "50", "--reps", "30", "--seed", "14"];
    let mut one = base.to_vec();
    one.extend(["--threads", "1", "--output", path(&x)]);
    let mut two = base.to_vec();
    two.extend(["--threads", "2", "--output", path(&y)]);
    assert!(rpod(&one).status.success());
    assert!(rpod(&two).status.success());
    assert_eq!(cells(&x), cells(&y));
    assert_eq!(cells(&x)[0].report.as_ref().unwrap().config.seed, rpod::rng::derive_seed(14, 0));
}
