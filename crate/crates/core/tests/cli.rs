use std::fs;
use std::process::Command;

use wstate::efficiency::{
    asymptotic_efficiency, competitor_asymptotic, optimal_delta, optimal_efficiency, CSV_HEADER,
};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("wstate").chain(args.iter().copied());
    let code = wstate::cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn comment_value(report: &str, key: &str) -> f64 {
    let prefix = format!("# {key}=");
    report
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in report:\n{report}"))
        .parse()
        .unwrap()
}

#[test]
fn simulate_two_qubit_bosons() {
    let (code, out, _) = run(&["simulate", "--n", "2", "--statistics", "boson"]);
    assert_eq!(code, 0);
    assert!((comment_value(&out, "fidelity_w") - 1.0).abs() < 1e-10);
    assert!((comment_value(&out, "success_probability") - 0.5).abs() < 1e-10);
    let rows: Vec<_> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "bitstring,re,im,probability");
    assert_eq!(rows.len(), 1 + 4);
    assert!(!out.contains("sign_mismatch"));
}

#[test]
fn simulate_fermions_without_correction_flags_signs() {
    let (code, out, _) = run(&[
        "simulate",
        "--n",
        "3",
        "--delta",
        "0.65",
        "--statistics",
        "fermion",
        "--no-phase-correction",
    ]);
    assert_eq!(code, 0);
    assert!((comment_value(&out, "fidelity_w") - 1.0 / 9.0).abs() < 1e-10);
    let line = out
        .lines()
        .find(|l| l.starts_with("# sign_mismatch="))
        .unwrap();
    assert!(line.contains("010 001"), "{line}");
    assert!(!line.contains("100"), "{line}");
}

#[test]
fn simulate_fermions_with_correction_gives_w() {
    let (code, out, _) = run(&["simulate", "--n", "4", "--statistics", "fermion"]);
    assert_eq!(code, 0);
    assert!((comment_value(&out, "fidelity_w") - 1.0).abs() < 1e-10);
    assert!(out.contains("phase_correction=true"));
}

#[test]
fn simulate_json_is_well_formed() {
    let (code, out, _) = run(&[
        "simulate",
        "--n",
        "3",
        "--format",
        "json",
        "--random-completion",
        "5",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(v["statistics"], "boson");
    assert_eq!(v["amplitudes"].as_array().unwrap().len(), 8);
    let p = v["success_probability"].as_f64().unwrap();
    assert!((p - optimal_efficiency(3)).abs() < 1e-10);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["simulate", "--n", "1"][..],
        &["simulate"],
        &["simulate", "--n", "3", "--statistics", "anyon"],
        &["frobnicate"],
        &[],
    ] {
        let (code, out, err) = run(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty());
        assert!(!err.is_empty());
    }
}

#[test]
fn help_exits_zero_on_stdout() {
    let (code, out, err) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("figure2"));
    assert!(err.is_empty());
}

#[test]
fn contract_violations_exit_one() {
    let (code, _, err) = run(&["simulate", "--n", "3", "--delta", "1.5"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"));
    let (code, _, _) = run(&["simulate", "--n", "3", "--delta", "0"]);
    assert_eq!(code, 1);
}

#[test]
fn figure2_single_row() {
    let (code, out, _) = run(&["figure2", "--n", "2"]);
    assert_eq!(code, 0);
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 2);
    assert!(
        lines[1].starts_with("2,0.707106781187,0.5,"),
        "{}",
        lines[1]
    );
}

#[test]
fn figure2_file_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let (code, out, _) = run(&["figure2", "--n", "40", "--output", p.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
    }
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());

    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    assert_eq!(
        reader
            .headers()
            .unwrap()
            .iter()
            .collect::<Vec<_>>()
            .join(","),
        CSV_HEADER
    );
    let mut count = 0;
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.unwrap();
        let n: usize = rec[0].parse().unwrap();
        assert_eq!(n, i + 2);
        let col = |j: usize| rec[j].parse::<f64>().unwrap();
        assert!((col(1) - optimal_delta(n)).abs() < 1e-10);
        assert!((col(2) - optimal_efficiency(n)).abs() < 1e-10);
        assert!((col(3) - asymptotic_efficiency(n)).abs() < 1e-10);
        assert!((col(4) - competitor_asymptotic(n)).abs() < 1e-10);
        count += 1;
    }
    assert_eq!(count, 40 - 1);
}

#[test]
fn figure2_json() {
    let (code, out, _) = run(&["figure2", "--n", "5", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["N"], 2);
}

#[test]
fn unwritable_output_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let (code, _, err) = run(&["figure2", "--n", "3", "--output", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("error"));
}

#[test]
fn efficiency_and_optimize_reports() {
    let (code, out, _) = run(&["efficiency", "--n", "2", "--delta", "0.7071067811865476"]);
    assert_eq!(code, 0);
    assert!(out.contains("efficiency=0.5\n"), "{out}");

    let (code, out, _) = run(&["optimize", "--n", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("delta_max_sq=0.42264973081\n"), "{out}");
    assert!(out.contains("eff_max=0.154700538379"), "{out}");
}

#[test]
fn verify_default_passes() {
    let (code, out, _) = run(&["verify"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("verify: N=2..8 seed=2021"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn verify_beyond_oracle_guard_skips_explicitly() {
    let (code, out, _) = run(&["verify", "--n", "9"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().any(|l| l.starts_with("SKIP")));
    assert!(out.lines().any(|l| l.starts_with("PASS")));
    assert!(!out.contains("FAIL"));
}

#[test]
fn unitary_dump_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.json");
    let (code, _, _) = run(&[
        "simulate",
        "--n",
        "3",
        "--unitary-json",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let u = wstate::circuit::read_unitary_json(&path).unwrap();
    let params =
        wstate::ProtocolParams::balanced(3, optimal_delta(3), wstate::ParticleStatistics::Boson)
            .unwrap();
    let g = wstate::GCompletion::gram_schmidt(3).unwrap();
    let expected = wstate::circuit::build_protocol_unitary(&params, &g).unwrap();
    assert_eq!(u, expected);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_wstate");
    let ok = Command::new(bin)
        .args(["figure2", "--n", "3"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8(ok.stdout).unwrap().lines().count(), 3);

    let usage = Command::new(bin)
        .args(["simulate", "--n", "1"])
        .output()
        .unwrap();
    assert_eq!(usage.status.code(), Some(2));
    assert!(!usage.stderr.is_empty());

    let bad = Command::new(bin)
        .args(["figure2", "--n", "3", "--output", "/nonexistent/dir/x.csv"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
