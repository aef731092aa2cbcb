use std::path::Path;
use std::process::{Command, Output};

use mmrx_core::chart::CSV_COLUMNS;
use mmrx_core::montecarlo::{Scenario, PRESET_NAMES};
use mmrx_core::ChartDocument;

fn mmrx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmrx")).args(args).output().expect("mmrx runs")
}

fn sweep_to(out: &Path, seed: &str) -> Output {
    mmrx(&[
        "sweep",
        "--preset",
        "downlink",
        "--trials",
        "6",
        "--seed",
        seed,
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a.json"), dir.path().join("b.json"), dir.path().join("c.json"));
    assert!(sweep_to(&a, "5").status.success());
    assert!(sweep_to(&b, "5").status.success());
    assert!(sweep_to(&c, "6").status.success());
    let (a, b, c) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap(), std::fs::read(c).unwrap());
    assert_eq!(a, b);
    assert_ne!(a, c);
    let doc = ChartDocument::from_json_str(std::str::from_utf8(&a).unwrap()).unwrap();
    assert_eq!(doc.points.len(), 24);
    assert_eq!((doc.metadata.seed, doc.metadata.trials), (5, 6));
}

#[test]
fn malformed_scenario_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("bad.toml");
    let out = dir.path().join("chart.json");
    let mut text = Scenario::downlink().to_toml_string();
    text = text.replace("n_rx = 16", "n_rx = 0");
    std::fs::write(&scenario, &text).unwrap();
    let o = mmrx(&["sweep", "--scenario", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("n_rx"), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.exists());

    std::fs::write(&scenario, "name = [").unwrap();
    let o = mmrx(&["sweep", "--scenario", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(!out.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn csv_output_has_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chart.csv");
    let o = sweep_to(&out, "1");
    assert!(o.status.success());
    let text = std::fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
    assert_eq!(lines.count(), 24);
}

#[test]
fn utility_reports_extremes_and_rejects_bad_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chart.json");
    assert!(sweep_to(&out, "2").status.success());
    let doc = ChartDocument::from_json_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let chart = out.to_str().unwrap();

    let o = mmrx(&["utility", chart, "--alpha", "0,1"]);
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = stdout.lines().skip(2).collect();
    assert_eq!(rows.len(), 2);
    let max_se = &doc.points[doc.select(0.0).unwrap()];
    let max_ee = &doc.points[doc.select(1.0).unwrap()];
    assert!(doc.points.iter().all(|p| p.se <= max_se.se && p.ee <= max_ee.ee));
    assert!(rows[0].contains(&format!("{:.4}", max_se.se)), "{}", rows[0]);
    assert!(rows[1].contains(&format!("{:.4}", max_ee.ee / 1e9)), "{}", rows[1]);

    let o = mmrx(&["utility", chart]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 2 + 11);

    for bad in ["1.5", "-0.1", "x"] {
        let o = mmrx(&["utility", chart, "--alpha", bad]);
        assert!(!o.status.success(), "alpha {bad}");
    }
}

#[test]
fn preset_listing_and_round_trip() {
    let o = mmrx(&["preset"]);
    assert!(o.status.success());
    let names: Vec<String> = String::from_utf8(o.stdout).unwrap().lines().map(str::to_string).collect();
    assert_eq!(names, PRESET_NAMES);

    let o = mmrx(&["preset", "uplink"]);
    assert!(o.status.success());
    let parsed = Scenario::from_toml_str(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert_eq!(parsed, Scenario::preset("uplink").unwrap());

    assert!(!mmrx(&["preset", "nope"]).status.success());
}
