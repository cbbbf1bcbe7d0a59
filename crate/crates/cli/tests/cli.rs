//! End-to-end checks of the binary: exit codes, file output, reproducibility.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gaussdyn"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gaussdyn-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn verify_single_campaign_writes_report_and_is_deterministic() {
    let dir = tmp_dir("verify");
    let out = run(&["verify", "sec-3.3-maps", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    let report = dir.join("report-sec-3_3-maps.json");
    assert!(report.exists());
    let first = fs::read(&report).unwrap();
    let out2 = run(&["verify", "sec-3.3-maps", "--out", dir.to_str().unwrap()]);
    assert!(out2.status.success());
    let second = fs::read(&report).unwrap();
    assert_eq!(first, second, "report files must be byte-identical");
    let parsed: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(parsed["campaign"], "sec-3.3-maps");
    assert_eq!(parsed["pass"], true);
    assert!(parsed["checks"].as_array().unwrap().len() >= 3);
    assert_eq!(parsed["wall_time_ms"], 0);
}

#[test]
fn verify_unknown_campaign_exits_with_usage_error() {
    let out = run(&["verify", "bogus"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bogus"));
    assert!(stderr.contains("prop-kappa1"), "must name valid ids");
}

#[test]
fn wandering_rejects_parameter_one() {
    let out = run(&["wandering", "--family", "sigma", "--param", "1.0", "--n-max", "1"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("strictly inside (0,1)"));
}

#[test]
fn wandering_table_has_rows_bounds_and_footer() {
    let dir = tmp_dir("wandering");
    let path = dir.join("w.csv");
    let out = run(&[
        "wandering",
        "--family",
        "sigma",
        "--gamma",
        "0.5",
        "--n-max",
        "3",
        "--resolution",
        "20000",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "N,measure,bound,violation");
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 1 + 3, "header plus 3 rows");
    assert!(text.contains("# violations 0"));
    assert!(text.contains("# gaussdyn"));
    // Deterministic rerun.
    let path2 = dir.join("w2.csv");
    run(&[
        "wandering",
        "--family",
        "sigma",
        "--gamma",
        "0.5",
        "--n-max",
        "3",
        "--resolution",
        "20000",
        "--out",
        path2.to_str().unwrap(),
    ]);
    assert_eq!(
        fs::read_to_string(&path).unwrap().replace("w.csv", ""),
        fs::read_to_string(&path2).unwrap().replace("w2.csv", "")
    );
}

#[test]
fn spiral_single_point_and_range_floor() {
    let out = run(&["spiral", "--x-min", "2.0", "--x-max", "2.0", "--step", "0.5"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 2, "header plus one row: {text}");

    let out = run(&["spiral", "--x-min", "0.1", "--x-max", "10.0", "--step", "0.33"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let footer = text
        .lines()
        .find(|l| l.starts_with("# min_modulus"))
        .expect("footer present");
    let min: f64 = footer.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(min >= 1e-3, "{min}");
}

#[test]
fn iterate_zero_steps_gives_single_row() {
    let out = run(&[
        "iterate",
        "--kind",
        "subs",
        "--gamma",
        "0.6",
        "--f",
        "const1",
        "--n-max",
        "0",
        "--grid",
        "24",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0], "n,l1,sup,elapsed_ms");
    assert!(rows[1].starts_with("0,1."), "norm of 1 on the unit interval: {}", rows[1]);
}

#[test]
fn iterate_decay_table_is_monotone_after_two() {
    let dir = tmp_dir("iterate");
    let path = dir.join("decay.csv");
    let out = run(&[
        "iterate",
        "--kind",
        "subs",
        "--gamma",
        "0.6",
        "--f",
        "const1",
        "--n-max",
        "12",
        "--grid",
        "32",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = fs::read_to_string(&path).unwrap();
    let values: Vec<f64> = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 13);
    for w in values.windows(2).skip(2) {
        assert!(w[1] <= w[0] + 1e-9, "{values:?}");
    }
}

#[test]
fn lattice_trivial_scan_is_total_mass() {
    let out = run(&[
        "lattice",
        "--density",
        "f0",
        "--m-max",
        "0",
        "--n-max",
        "0",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 2);
    // Total mass of the critical density is 0 (the two branches cancel).
    let value: f64 = rows[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!(value.abs() < 1e-6, "{value}");
}

#[test]
fn lattice_critical_scan_passes_threshold() {
    let dir = tmp_dir("lattice");
    let path = dir.join("scan.csv");
    let out = run(&[
        "lattice",
        "--density",
        "f0",
        "--m-max",
        "3",
        "--n-max",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = fs::read_to_string(&path).unwrap();
    let footer = text
        .lines()
        .find(|l| l.starts_with("# max_residual"))
        .unwrap();
    let max: f64 = footer.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(max <= 1e-4, "{max}");
}

#[test]
fn iterate_kappa1_at_critical_parameter_is_flat_on_the_core() {
    // The invariant density stays fixed: the localized norms are constant.
    let out = run(&[
        "iterate",
        "--kind",
        "subt",
        "--beta",
        "1.0",
        "--f",
        "kappa1",
        "--n-max",
        "5",
        "--grid",
        "64",
        "--sub=-0.9:0.9",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = String::from_utf8_lossy(&out.stdout);
    let values: Vec<f64> = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 6);
    for v in &values {
        assert!((v - values[0]).abs() < 1e-6, "{values:?}");
    }
}

#[test]
fn spiral_json_format() {
    let out = run(&[
        "spiral",
        "--x-min",
        "1.0",
        "--x-max",
        "2.0",
        "--step",
        "0.5",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{out:?}");
    let parsed: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("valid json");
    assert_eq!(parsed["rows"].as_array().unwrap().len(), 3);
    assert!(parsed["rows"][0]["modulus"].as_f64().unwrap() > 1e-3);
    assert!(parsed["provenance"].as_str().unwrap().contains("spiral"));
}

#[test]
fn bad_function_spec_is_usage_error() {
    let out = run(&[
        "iterate",
        "--kind",
        "subt",
        "--beta",
        "0.5",
        "--f",
        "nonsense",
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

/// Full end-to-end run of every campaign through the binary. Slow; run
/// explicitly with `cargo test -p gaussdyn-cli -- --ignored`.
#[test]
#[ignore]
fn verify_all_end_to_end() {
    let dir = tmp_dir("verify-all");
    let out = run(&["verify", "all", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    let reports = fs::read_dir(&dir).unwrap().count();
    assert_eq!(reports, 44);
}
