use std::path::Path;
use std::process::{Command, Output};

fn semrd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semrd")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

fn header(path: &Path) -> Vec<String> {
    csv::Reader::from_path(path).unwrap().headers().unwrap().iter().map(str::to_string).collect()
}

fn sweep(config: &str) -> (Output, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, config).unwrap();
    let out = dir.path().join("out.csv");
    let o = semrd(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    (o, dir)
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&semrd(&[])), 1);
    assert_eq!(code(&semrd(&["frobnicate"])), 1);
    assert_eq!(code(&semrd(&["figure", "fig4"])), 1, "missing --out");
    assert_eq!(code(&semrd(&["verify", "everything"])), 1);
    let o = semrd(&["figure", "fig10", "--out", "unused"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("unknown figure id"));
}

#[test]
fn help_exits_cleanly() {
    let o = semrd(&["--help"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("verify"));
}

#[test]
fn fig4_csv_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = semrd(&["figure", "fig4", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let path = dir.path().join("fig4.csv");
    let cols = header(&path);
    let col = |n: &str| cols.iter().position(|c| c == n).unwrap();
    let rows = read_rows(&path);
    assert_eq!(rows.len(), 201);
    let at = |d: f64, name: &str| -> f64 {
        let r = rows.iter().find(|r| (r[0].parse::<f64>().unwrap() - d).abs() < 1e-12).unwrap();
        r[col(name)].parse().unwrap()
    };
    assert!((at(0.1, "rate_plain") - 0.531004).abs() < 1e-6);
    assert!((at(0.2, "rate_semantic") - 0.456436).abs() < 1e-6);
    assert!(dir.path().join("fig4_manifest.json").exists());
}

#[test]
fn fig8_manifest_minimum_rate_in_both_bases() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&semrd(&["figure", "fig8", "--out", d, "--grid", "6"])), 0);
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig8_manifest.json")).unwrap()).unwrap();
    assert!((m["minimum_rate"].as_f64().unwrap() - 0.2027).abs() < 1e-4);
    assert_eq!(m["base"], "nats");
    assert_eq!(read_rows(&dir.path().join("fig8.csv")).len(), 36);

    assert_eq!(code(&semrd(&["figure", "fig8", "--out", d, "--grid", "6", "--base", "bits"])), 0);
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig8_manifest.json")).unwrap()).unwrap();
    assert!((m["minimum_rate"].as_f64().unwrap() - 0.5 * 1.5f64.log2()).abs() < 1e-9);
}

#[test]
fn fig5_routes_every_cell_outside_the_closed_form_region_to_the_solver() {
    let dir = tempfile::tempdir().unwrap();
    let o = semrd(&["figure", "fig5", "--out", dir.path().to_str().unwrap(), "--grid", "5"]);
    assert_eq!(code(&o), 0);
    let path = dir.path().join("fig5.csv");
    let m = header(&path).iter().position(|c| c == "method").unwrap();
    let rows = read_rows(&path);
    assert_eq!(rows.len(), 25);
    // D2 = 0.5 exceeds p1 = 0.25, so no cell is inside the region
    assert!(rows.iter().all(|r| &r[m] == "ba"));
}

#[test]
fn single_point_binary_sweep() {
    let (o, dir) = sweep(
        r#"{"kind": "binary_correlated", "params": {"p": 0.25, "p1": 0.25, "p2": 0.25},
            "grid": {"d1": [0.05], "d2": [0.1], "ds": [0.3]}}"#,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let path = dir.path().join("out.csv");
    let cols = header(&path);
    let rows = read_rows(&path);
    assert_eq!(rows.len(), 1);
    let rate: f64 = rows[0][cols.iter().position(|c| c == "rate").unwrap()].parse().unwrap();
    assert!((rate - 0.867163).abs() < 1e-6);
    assert_eq!(&rows[0][cols.iter().position(|c| c == "method").unwrap()], "closed_form");
}

#[test]
fn empty_grid_is_a_usage_error() {
    let (o, _dir) = sweep(
        r#"{"kind": "binary_correlated", "params": {"p": 0.25, "p1": 0.25, "p2": 0.25},
            "grid": {"d1": [], "d2": [0.1], "ds": [0.3]}}"#,
    );
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("empty grid"));
}

#[test]
fn schema_errors_name_the_field() {
    let (o, _dir) = sweep(
        r#"{"kind": "binary_correlated", "params": {"p": 0.25, "p1": "a lot", "p2": 0.25},
            "grid": {"d1": [0.05], "d2": [0.1], "ds": [0.3]}}"#,
    );
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("params.p1"), "{}", stderr(&o));
}

#[test]
fn gaussian_target_below_mmse_is_flagged() {
    let (o, dir) = sweep(
        r#"{"kind": "gaussian",
            "params": {"var_s": 2, "var_x1": 2, "var_x2": 2, "var_y": 2, "cov_sx1": 1, "cov_x1y": 1, "cov_x2y": 1},
            "grid": {"d1": [0.5], "d2": [1.0], "ds": [1.0, 2.0]}}"#,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let path = dir.path().join("out.csv");
    let m = header(&path).iter().position(|c| c == "method").unwrap();
    let rows = read_rows(&path);
    assert_eq!(&rows[0][m], "infeasible");
    assert_eq!(&rows[1][m], "closed_form");
}

#[test]
fn custom_sweep_with_semantic_tables() {
    let (o, dir) = sweep(
        r#"{"kind": "custom", "method": "ba",
            "params": {
                "sizes": [2, 1, 1],
                "source": [0.5, 0.5],
                "d1": [[0, 1], [1, 0]],
                "d2": [[0]],
                "semantic": {"joint": [[0.45, 0.05], [0.05, 0.45]], "ds": [[0, 1], [1, 0]]}
            },
            "grid": {"d1": [1.0], "d2": [0.0], "ds": [0.2]}}"#,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let path = dir.path().join("out.csv");
    let cols = header(&path);
    let row = &read_rows(&path)[0];
    let rate: f64 = row[cols.iter().position(|c| c == "rate").unwrap()].parse().unwrap();
    // semantic bit behind a BSC(0.1), Ds = 0.2
    let h = |x: f64| -x * x.log2() - (1.0 - x) * (1.0 - x).log2();
    assert!((rate - (1.0 - h(0.125))).abs() < 1e-3, "{rate}");
}

#[test]
fn verify_channels_json() {
    let o = semrd(&["verify", "channels", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["suite"], "channels");
    assert_eq!(v["passed"], true);
    for c in v["checks"].as_array().unwrap() {
        if let Some(t) = c["tolerance"].as_f64() {
            assert!(c["value"].as_f64().unwrap() <= t, "{c}");
        }
    }
}

#[test]
fn verify_text_report() {
    let o = semrd(&["verify", "channels"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().any(|l| l.starts_with("PASS correlated-rate")));
    assert!(text.trim_end().ends_with("suite channels: PASS"));
}
