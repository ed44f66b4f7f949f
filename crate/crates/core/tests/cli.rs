use std::process::Command;

use tailbiting::decoder::Mode;
use tailbiting::sim::{run_sweep, SimConfig};

fn tbt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tbt-decode"))
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn sweep_writes_csv_with_header_and_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let st = tbt()
        .args(["sweep", "--code", "hamming74", "--modes", "exact,approx1", "--snr", "1,3", "--frames", "200", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# generated_unix_time="));
    assert!(text.contains("information-bit errors"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][2], "exact");
    assert_eq!(rows[3][0], "3.0");
}

#[test]
fn sweep_to_stdout_with_ebn0_axis() {
    let out = tbt()
        .args(["sweep", "--code", "conv7_5_L8", "--modes", "exact", "--snr", "0", "--snr-unit", "ebn0"])
        .args(["--frames", "50", "--reproducible"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = data_rows(&text);
    let es: f64 = rows[0][0].parse().unwrap();
    let eb: f64 = rows[0][1].parse().unwrap();
    assert!((es + 3.0103).abs() < 1e-3);
    assert!(eb.abs() < 1e-9);
}

#[test]
fn bad_inputs_fail() {
    for args in [
        vec!["sweep", "--code", "nope", "--frames", "1"],
        vec!["sweep", "--code", "hamming74", "--frames", "0"],
        vec!["sweep", "--code", "hamming74", "--frames", "100", "--max-frames", "10"],
        vec!["sweep", "--code", "hamming74", "--modes", "fast"],
        vec!["sweep", "--code", "conv35_31_L4"],
        vec!["compare", "--code", "hamming74", "--modes", "exact", "--frames", "5"],
    ] {
        let st = tbt().args(&args).output().unwrap();
        assert!(!st.status.success(), "{args:?} should fail");
    }
}

#[test]
fn compare_writes_discrepancies() {
    let dir = tempfile::tempdir().unwrap();
    let jsonl = dir.path().join("d.jsonl");
    let out = tbt()
        .args(["compare", "--code", "hamming74", "--modes", "exact,approx1", "--snr", "0", "--frames", "20000"])
        .args(["--reproducible", "--discrepancies"])
        .arg(&jsonl)
        .output()
        .unwrap();
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("mismatches 0/20000"), "{err}");
    let lines: Vec<serde_json::Value> = std::fs::read_to_string(&jsonl)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(!lines.is_empty());
    for d in &lines {
        assert_eq!(d["uses_linear_rows"], true);
        assert!(d["exact"]["cost"].as_f64().unwrap() < d["approx"]["cost"].as_f64().unwrap());
    }
}

#[test]
fn file_codes_and_all_zero() {
    let golay = concat!(env!("CARGO_MANIFEST_DIR"), "/data/golay24_16state.tbt");
    let out = tbt()
        .args(["sweep", "--code", &format!("file:{golay}"), "--modes", "exact,approx2", "--snr", "2"])
        .args(["--frames", "300", "--all-zero", "--reproducible"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("transmitted=all-zero"));
    assert!(text.contains("states=192"));
}

#[test]
fn average_work_does_not_grow_with_snr() {
    let mut cfg = SimConfig::new("conv35_31_L20", vec![Mode::Exact], (0..=10).map(|s| s as f64 * 0.5).collect(), 4000);
    cfg.reproducible = true;
    let rows = run_sweep(&cfg).unwrap();
    for w in rows.windows(2) {
        assert!(
            w[1].avg_node_computations <= w[0].avg_node_computations * 1.02,
            "{} dB: {} then {} dB: {}",
            w[0].snr_db,
            w[0].avg_node_computations,
            w[1].snr_db,
            w[1].avg_node_computations
        );
    }
    assert!(rows.last().unwrap().avg_node_computations >= 320.0);
}

#[test]
fn high_snr_work_is_exactly_v() {
    let cfg = SimConfig::new("conv133_171_L48", vec![Mode::Exact, Mode::Approx1], vec![40.0], 50);
    for r in run_sweep(&cfg).unwrap() {
        assert_eq!(r.avg_node_computations, 3072.0);
        assert_eq!(r.bit_errors, 0);
    }
}
