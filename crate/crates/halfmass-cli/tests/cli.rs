//! End-to-end tests of the `halfmass` binary: flags, file formats, exit
//! codes and determinism across worker counts.

use std::process::{Command, Output};

fn halfmass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halfmass"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn halfmass_with_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halfmass"))
        .env("RAYON_NUM_THREADS", threads)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn validate_flat_exits_zero_with_all_zero_report() {
    let out = halfmass(&["validate", "--metric", "flat", "--order", "12"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("all checks passed"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn converge_emits_constant_hawking_disk_column() {
    let out = halfmass(&[
        "converge",
        "--metric",
        "half-schwarzschild",
        "--m",
        "1",
        "--functional",
        "hawking-disk",
        "--r",
        "10:1000:8",
        "--order",
        "16",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut data_rows = 0;
    for line in text.lines() {
        if line.starts_with('#') || line.starts_with("metric,") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[2], "hawking-disk");
        let value: f64 = fields[4].parse().unwrap();
        assert!((value - 1.0).abs() < 1e-8, "row {line}");
        data_rows += 1;
    }
    assert_eq!(data_rows, 8);
    assert!(text.contains("flags=BelowNoiseFloor"));
}

#[test]
fn evaluate_conformal_flux_matches_half_amplitude() {
    let out = halfmass(&[
        "evaluate",
        "--metric",
        "conformal",
        "--a",
        "2",
        "--tau",
        "1",
        "--functional",
        "adm-flux",
        "--r",
        "500",
        "--order",
        "16",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text
        .lines()
        .find(|l| l.starts_with("conformal"))
        .expect("data row");
    let value: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
    assert!((value - 1.0).abs() < 1e-4, "value {value}");
}

#[test]
fn jsonl_rows_share_field_names_with_csv() {
    let out = halfmass(&[
        "evaluate",
        "--metric",
        "flat",
        "--functional",
        "adm-flux",
        "--r",
        "10",
        "--order",
        "8",
        "--format",
        "jsonl",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    for key in [
        "metric",
        "params",
        "functional",
        "r",
        "value",
        "area",
        "volume",
        "theta",
        "quad_order",
        "warnings",
    ] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn config_file_drives_a_run_and_flags_override_it() {
    let dir = std::env::temp_dir().join("halfmass-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.conf");
    std::fs::write(
        &path,
        "[metric]\nfamily = half-schwarzschild\nm = 1.0\n[run]\nfunctionals = adm-flux\nr = 100\norder = 12\n",
    )
    .unwrap();
    let out = halfmass(&["evaluate", "--config", path.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("# metric.family = half-schwarzschild"));
    let row = text.lines().find(|l| l.starts_with("half-")).unwrap();
    let value: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
    assert!((value - 1.015075125).abs() < 1e-9);

    // flag overrides the file's mass parameter
    let out = halfmass(&["evaluate", "--config", path.to_str().unwrap(), "--m", "2.0"]);
    let text = stdout(&out);
    let row = text.lines().find(|l| l.starts_with("half-")).unwrap();
    let value: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
    assert!((value - 2.0 * (1.0 + 1.0 / 100.0f64).powi(3)).abs() < 1e-9);
}

#[test]
fn config_errors_exit_two() {
    let out = halfmass(&["evaluate", "--metric", "nosuch", "--r", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let out = halfmass(&["evaluate", "--metric", "flat"]);
    assert_eq!(out.status.code(), Some(2)); // no radius given
    let out = halfmass(&[
        "converge",
        "--metric",
        "flat",
        "--functional",
        "adm-flux",
        "--r",
        "10:100:2",
    ]);
    assert_eq!(out.status.code(), Some(2)); // too few radii to fit

    let dir = std::env::temp_dir().join("halfmass-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.conf");
    std::fs::write(&path, "[nosuchsection]\nx = 1\n").unwrap();
    let out = halfmass(&["evaluate", "--config", path.to_str().unwrap(), "--r", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validation_failures_exit_one() {
    // An impossible tolerance forces a failure without a defect.
    let out = halfmass(&[
        "validate",
        "--metric",
        "half-schwarzschild",
        "--m",
        "1",
        "--order",
        "12",
        "--tol-schwarzschild",
        "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn csv_output_is_identical_across_worker_counts() {
    let args = [
        "converge",
        "--metric",
        "half-schwarzschild",
        "--m",
        "1",
        "--functional",
        "adm-flux,hawking-disk",
        "--r",
        "10:100:5",
        "--order",
        "12",
    ];
    let one = halfmass_with_threads(&args, "1");
    let four = halfmass_with_threads(&args, "4");
    assert!(one.status.success());
    assert_eq!(
        one.stdout, four.stdout,
        "output differs across thread counts"
    );
}
