use std::path::Path;
use std::process::{Command, Output};

use qdiscord::families;
use qdiscord_cli::input::StateEntry;
use qdiscord_cli::record::{from_csv, ResultRecord};
use tempfile::TempDir;

fn qdiscord(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdiscord"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_json<T: serde::Serialize>(dir: &TempDir, name: &str, v: &T) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

fn records(out: &Output) -> Vec<ResultRecord> {
    serde_json::from_slice(&out.stdout).expect("json records")
}

fn csv_rows(out: &Output) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(out.stdout.as_slice())
        .records()
        .collect::<Result<_, _>>()
        .unwrap()
}

fn column(rows: &[csv::StringRecord], header: &csv::StringRecord, name: &str) -> Vec<String> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].to_string()).collect()
}

fn header(out: &Output) -> csv::StringRecord {
    csv::Reader::from_reader(out.stdout.as_slice()).headers().unwrap().clone()
}

#[test]
fn pure_state_record() {
    let dir = TempDir::new().unwrap();
    let f = write_json(&dir, "pure.json", &StateEntry::dense(families::pure_n(0.6).unwrap().matrix()));
    let out = qdiscord(&["compute", &f]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = &records(&out)[0];
    assert!((r.d1 - 0.6).abs() < 1e-12);
    assert!((r.d2 - 0.36).abs() < 1e-12);
    assert_eq!(r.branch.name(), "fully_degenerate");
    assert_eq!(r.id, f);
    assert!(r.wall_time.is_none());
}

#[test]
fn maximally_mixed_state_has_no_discord() {
    let dir = TempDir::new().unwrap();
    let entry = serde_json::json!({"x": [0, 0, 0], "y": [0, 0, 0], "K": [[0, 0, 0], [0, 0, 0], [0, 0, 0]]});
    let f = write_json(&dir, "mm.json", &entry);
    let out = qdiscord(&["compute", &f, "--certify"]);
    assert!(out.status.success());
    let r = &records(&out)[0];
    assert_eq!(r.d1, 0.0);
    assert!(r.deviation.unwrap() < 1e-6);
}

#[test]
fn dense_and_bloch_inputs_agree() {
    let dir = TempDir::new().unwrap();
    let s = families::rho_theta(0.4);
    let mut a = StateEntry::dense(s.matrix());
    a.id = Some("s".into());
    let mut b = StateEntry::bloch(&s.bloch());
    b.id = Some("s".into());
    let fa = write_json(&dir, "a.json", &vec![a]);
    let fb = write_json(&dir, "b.json", &vec![b]);
    let ra = records(&qdiscord(&["compute", &fa]));
    let rb = records(&qdiscord(&["compute", &fb]));
    let (ra, rb) = (&ra[0], &rb[0]);
    assert_eq!(ra.branch, rb.branch);
    for (u, v) in [(ra.d1, rb.d1), (ra.d2, rb.d2), (ra.lower_bound, rb.lower_bound)]
        .into_iter()
        .chain(ra.spectrum.iter().copied().zip(rb.spectrum.iter().copied()))
        .chain(ra.axis.iter().copied().zip(rb.axis.iter().copied()))
    {
        assert!((u - v).abs() < 1e-10, "{u} vs {v}");
    }
}

#[test]
fn invalid_states_exit_2_but_valid_ones_are_reported() {
    let dir = TempDir::new().unwrap();
    let entries = serde_json::json!([
        {"id": "ok", "x": [0, 0, 0], "y": [0, 0, 0], "K": [[0.5, 0, 0], [0, -0.5, 0], [0, 0, 0.5]]},
        {"id": "bad", "x": [0, 0, 0], "y": [0, 0, 0], "K": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}
    ]);
    let f = write_json(&dir, "mixed.json", &entries);
    let out = qdiscord(&["compute", &f]);
    assert_eq!(out.status.code(), Some(2));
    let recs = records(&out);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0].id, "ok");
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad"));
}

#[test]
fn malformed_or_missing_files_exit_2() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("broken.json");
    std::fs::write(&p, "{\"rho\": [1, 2").unwrap();
    assert_eq!(qdiscord(&["compute", p.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(qdiscord(&["compute", missing.to_str().unwrap()]).status.code(), Some(2));
    let unknown = write_json(&dir, "u.json", &serde_json::json!({"x": [0, 0, 0], "z": 1}));
    assert_eq!(qdiscord(&["compute", &unknown]).status.code(), Some(2));
}

#[test]
fn output_is_reproducible_and_csv_round_trips() {
    let dir = TempDir::new().unwrap();
    let states: Vec<StateEntry> = qdiscord::sampling::ginibre_suite(7, 12)
        .iter()
        .map(|s| StateEntry::bloch(&s.bloch()))
        .collect();
    let f = write_json(&dir, "suite.json", &states);
    let a = qdiscord(&["compute", &f, "--certify"]);
    let b = qdiscord(&["compute", &f, "--certify"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);

    let out_path = dir.path().join("suite.csv");
    let c = qdiscord(&["compute", &f, "--certify", "--format", "csv", "--out", out_path.to_str().unwrap()]);
    assert!(c.status.success());
    assert!(c.stdout.is_empty());
    let from_file = from_csv(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(from_file, records(&a));
    assert_eq!(from_file[3].id, format!("{f}#3"));
}

#[test]
fn timing_is_opt_in() {
    let dir = TempDir::new().unwrap();
    let f = write_json(&dir, "w.json", &StateEntry::bloch(&families::werner(0.2).unwrap().bloch()));
    let r = records(&qdiscord(&["compute", &f, "--timing"]));
    assert!(r[0].wall_time.is_some_and(|t| t >= 0.0));
}

#[test]
fn werner_sweep_is_abs_t() {
    let out = qdiscord(&["sweep", "--family", "werner", "--range", "t=-1:1/3:0.01", "--certify"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let h = header(&out);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 134);
    let t = column(&rows, &h, "t");
    let d1 = column(&rows, &h, "d1");
    for (t, d) in t.iter().zip(&d1) {
        let (t, d): (f64, f64) = (t.parse().unwrap(), d.parse().unwrap());
        assert!((d - t.abs()).abs() < 1e-10, "t = {t}: {d}");
    }
    assert!(column(&rows, &h, "status").iter().all(|s| s == "ok"));
}

#[test]
fn rho_theta_sweep_matches_half_sine() {
    let out = qdiscord(&["sweep", "--family", "rho_theta", "--range", "theta=0:pi/2:0.01", "--format", "json"]);
    assert!(out.status.success());
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.len(), 158);
    for r in &rows {
        let th = r["params"]["theta"].as_f64().unwrap();
        let d1 = r["d1"].as_f64().unwrap();
        assert!((d1 - 0.5 * (2.0 * th).sin()).abs() < 1e-10, "theta = {th}: {d1}");
    }
}

#[test]
fn bell_diagonal_samples_record_skipped_points() {
    let args = [
        "sweep", "--family", "bell_diagonal", "--range", "i1=-1:1:0.1", "--range", "i2=-1:1:0.1", "--range",
        "i3=-1:1:0.1", "--samples", "400", "--seed", "3",
    ];
    let out = qdiscord(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(out.stdout, qdiscord(&args).stdout);
    let h = header(&out);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 400);
    let status = column(&rows, &h, "status");
    let skipped = status.iter().filter(|s| s.starts_with("skipped")).count();
    assert!(skipped > 0 && skipped < 400);
    let cols: Vec<Vec<String>> = ["i1", "i2", "i3", "d1"].iter().map(|n| column(&rows, &h, n)).collect();
    for i in 0..rows.len() {
        if status[i] != "ok" {
            assert!(cols[3][i].is_empty());
            continue;
        }
        let mut c: Vec<f64> = (0..3).map(|j| cols[j][i].parse::<f64>().unwrap().abs()).collect();
        c.sort_by(f64::total_cmp);
        let d1: f64 = cols[3][i].parse().unwrap();
        assert!((d1 - c[1]).abs() < 1e-10, "row {i}: {d1} vs {}", c[1]);
    }
}

#[test]
fn sweep_argument_errors_exit_2() {
    assert_eq!(qdiscord(&["sweep", "--family", "nope", "--range", "t=0:1:0.1"]).status.code(), Some(2));
    assert_eq!(qdiscord(&["sweep", "--family", "werner", "--range", "q=0:1:0.1"]).status.code(), Some(2));
    assert_eq!(qdiscord(&["sweep", "--family", "werner", "--range", "t=1:0:0.1"]).status.code(), Some(2));
}

#[test]
fn sweep_with_fixed_parameter() {
    let out = qdiscord(&[
        "sweep", "--family", "beyond_x", "--set", "gamma=0.8", "--range", "a=0:0.02:0.01", "--certify",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let h = header(&out);
    let rows = csv_rows(&out);
    let a = column(&rows, &h, "a");
    let d1 = column(&rows, &h, "d1");
    for (a, d) in a.iter().zip(&d1) {
        let (a, d): (f64, f64) = (a.parse().unwrap(), d.parse().unwrap());
        assert!((d - 2.0 * a).abs() < 1e-10);
    }
}

#[test]
fn certify_fixture_only_run_passes() {
    let out = qdiscord(&["certify", "--n-states", "0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(s["passed"], true);
    assert_eq!(s["n_states"], 0);
    assert!(s["n_fixtures"].as_u64().unwrap() > 0);
}

#[test]
fn certify_small_suite_passes_and_is_reproducible() {
    let args = ["certify", "--n-states", "40", "--seed", "11", "--format", "csv"];
    let out = qdiscord(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(out.stdout, qdiscord(&args).stdout);
    let rows = csv_rows(&out);
    let h = header(&out);
    assert!(rows.len() > 40);
    assert!(column(&rows, &h, "passed").iter().all(|p| p == "true"));
}

#[test]
fn certify_impossible_tolerance_exits_3() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("summary.json");
    let out = qdiscord(&["certify", "--n-states", "5", "--tol", "1e-15", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(s["passed"], false);
    assert!(!s["failures"].as_array().unwrap().is_empty());
}

#[test]
fn unwritable_output_exits_1() {
    let bad = Path::new("/nonexistent-dir/out.json");
    let out = qdiscord(&["certify", "--n-states", "0", "--out", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
