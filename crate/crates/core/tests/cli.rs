//! End-to-end tests of the `emfx` binary: config ingestion, CSV shape,
//! exit codes and byte-level determinism.

use std::io::Write as _;
use std::process::{Command, Output};

fn emfx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emfx"))
        .args(args)
        .env_remove("EMF_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn write_config(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().expect("temp file");
    f.write_all(text.as_bytes()).expect("write config");
    f
}

/// Small window so Monte Carlo invocations stay fast.
const SMALL: &str = "window_radius = 3000\n";

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn mean_defaults_to_single_row_with_header_comment() {
    let out = emfx(&["mean"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# emfx "));
    assert!(header.contains("model=Ppp"));
    assert!(header.contains("lambda_b=1e-6"));
    let columns = lines.next().unwrap();
    assert_eq!(columns, "value,ei_bs,ei_ul_u,ei_ul_tr,ei_total,percent_ul_u");
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].split(',').count(), 6);
    // passive defaults: no self-exposure term
    let ul_tr: f64 = rows[0].split(',').nth(3).unwrap().parse().unwrap();
    assert_eq!(ul_tr, 0.0);
}

#[test]
fn unit_suffixes_match_plain_si_values() {
    let suffixed = write_config(
        "lambda_b = 1 per_km2\ng_b = 10 dBi\ngamma = 20 dB\nrho_u = 0.008 mW\n",
    );
    let plain = write_config("lambda_b = 1e-6\ng_b = 10\ngamma = 100\nrho_u = 8e-6\n");
    let a = emfx(&["--config", suffixed.path().to_str().unwrap(), "mean"]);
    let b = emfx(&["--config", plain.path().to_str().unwrap(), "mean"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(data_rows(&stdout(&a)), data_rows(&stdout(&b)));
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let cfg = write_config("lambda_bogus = 3\n");
    let out = emfx(&["--config", cfg.path().to_str().unwrap(), "mean"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config error"));
}

#[test]
fn invalid_parameter_value_is_a_config_error() {
    let cfg = write_config("beta = 1.5\n");
    let out = emfx(&["--config", cfg.path().to_str().unwrap(), "mean"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_monotone_grid_is_a_config_error() {
    let out = emfx(&["mean", "--grid", "10,5,20"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_path_is_a_runtime_error() {
    let out = emfx(&["--out", "/nonexistent-dir/x.csv", "mean"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mean.csv");
    let to_file = emfx(&["--out", path.to_str().unwrap(), "mean", "--grid", "10,100"]);
    assert!(to_file.status.success());
    assert!(stdout(&to_file).is_empty());
    let to_stdout = emfx(&["mean", "--grid", "10,100"]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&to_stdout));
}

#[test]
fn simulate_requires_trials_and_dumps_rows() {
    assert_eq!(emfx(&["simulate"]).status.code(), Some(2));
    let cfg = write_config(SMALL);
    let path = cfg.path().to_str().unwrap();
    let passive = emfx(&["--config", path, "--mc-trials", "4", "simulate"]);
    assert!(passive.status.success());
    let text = stdout(&passive);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 4);
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 7);
        assert_eq!(cells[0], i.to_string());
        assert_eq!(cells[1], "passive");
        // no SINR for a passive observer
        assert_eq!(cells[6], "");
    }
    let active = emfx(&[
        "--config", path, "--observer", "active", "--mc-trials", "4", "simulate",
    ]);
    assert!(active.status.success());
    for row in data_rows(&stdout(&active)) {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[1], "active");
        assert!(!cells[6].is_empty());
    }
}

#[test]
fn mc_columns_follow_the_flag() {
    let cfg = write_config(SMALL);
    let path = cfg.path().to_str().unwrap();
    let plain = emfx(&["--config", path, "mean"]);
    assert!(!stdout(&plain).contains("mc_ei_total"));
    let with_mc = emfx(&["--config", path, "--mc-trials", "8", "mean"]);
    let text = stdout(&with_mc);
    assert!(text.contains("mc_ei_total"));
    let rows = data_rows(&text);
    assert_eq!(rows[0].split(',').count(), 11);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let cfg = write_config(SMALL);
    let path = cfg.path().to_str().unwrap();
    let args = [
        "--config", path, "--mc-trials", "10", "--seed", "7", "--observer", "active", "mean",
    ];
    let a = emfx(&args);
    let b = emfx(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    // worker count must not change the result
    let c = Command::new(env!("CARGO_BIN_EXE_emfx"))
        .args(args)
        .env("EMF_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn coverage_marks_exactly_one_argmax() {
    let out = emfx(&["coverage", "--eta-grid", "0.3,0.6,0.9"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 3);
    let marks: usize = rows
        .iter()
        .map(|r| r.rsplit(',').next().unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(marks, 1);
    for row in rows {
        let cov: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&cov));
    }
}

#[test]
fn cdf_grid_is_monotone() {
    let out = emfx(&["cdf", "--points", "8"]);
    assert!(out.status.success());
    let mut prev = -1.0;
    for row in data_rows(&stdout(&out)) {
        let c: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&c));
        assert!(c >= prev - 1e-6);
        prev = c;
    }
}

#[test]
fn sweep_validates_parameter_and_outputs() {
    assert_eq!(
        emfx(&["sweep", "--param", "bogus", "--grid", "1,2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        emfx(&["sweep", "--param", "eta", "--grid", "0.2,0.4", "--outputs", "bogus"])
            .status
            .code(),
        Some(2)
    );
    let out = emfx(&[
        "sweep",
        "--param",
        "gamma_db",
        "--grid",
        "0,10",
        "--outputs",
        "coverage,percent_ul_u",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("value,coverage,percent_ul_u"));
    assert_eq!(data_rows(&text).len(), 2);
}
