use std::path::Path;
use std::process::{Command, Output};

use qprob::figures::FIGURE_IDS;
use qprob::io::{Payload, ResultEnvelope};

fn qprob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qprob"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .env_remove("QPROB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn read_envelope(prefix: &Path) -> ResultEnvelope {
    let text = std::fs::read_to_string(prefix.with_extension("json")).unwrap();
    ResultEnvelope::from_json(&text).unwrap()
}

#[test]
fn stern_gerlach_at_the_maximally_mixed_state() {
    let csv = stdout(&qprob(&["kdq", "--preset", "stern_gerlach", "--rho01", "0", "--format", "csv"]));
    let mut rdr = csv::Reader::from_reader(csv.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let re = headers.iter().position(|h| h == "re_q").unwrap();
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    for r in rows {
        let v: f64 = r[re].parse().unwrap();
        assert!((v - 0.25).abs() < 1e-10);
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let args = |p: &str| vec!["work".to_string(), "--preset".into(), "driven_qubit".into(), "--out".into(), p.into()];
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for p in [&a, &b] {
        let argv = args(p.to_str().unwrap());
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        stdout(&qprob(&argv));
    }
    for ext in ["csv", "json"] {
        let x = std::fs::read(a.with_extension(ext)).unwrap();
        let y = std::fs::read(b.with_extension(ext)).unwrap();
        assert_eq!(x, y, "{ext} differs");
    }
}

#[test]
fn json_round_trips_and_carries_checks() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("table");
    stdout(&qprob(&["kdq", "--preset", "driven_qubit", "--out", prefix.to_str().unwrap()]));
    let env = read_envelope(&prefix);
    assert_eq!(env.metadata.command, "kdq");
    assert_eq!(env.metadata.timestamp, 1_700_000_000);
    assert_eq!(env.metadata.config_hash.len(), 64);
    let Payload::Table { rows } = &env.payload else {
        panic!("expected a table");
    };
    assert_eq!(rows.len(), 4);
    assert!(env.checks.normalization_residual.unwrap() < 1e-9);
    assert!(env.checks.nonpositivity.unwrap() > 0.0);
    let again = ResultEnvelope::from_json(&env.to_json()).unwrap();
    assert_eq!(again, env);
}

#[test]
fn summary_reports_aleph() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("t");
    let out = stdout(&qprob(&["kdq", "--preset", "qubit_ramsey", "--out", prefix.to_str().unwrap()]));
    assert!(out.contains("aleph = "), "{out}");
    assert!(out.contains("normalization residual = "), "{out}");
}

#[test]
fn ising_distribution_has_negative_weights_at_positive_work() {
    let csv = stdout(&qprob(&["ising", "--N", "12", "--lambda0", "0", "--lambda1", "0.5", "--beta", "0.1", "--p", "1", "--format", "csv"]));
    let mut rdr = csv::Reader::from_reader(csv.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let value = headers.iter().position(|h| h == "value").unwrap();
    let weight = headers.iter().position(|h| h == "re_weight").unwrap();
    let negative = rdr
        .records()
        .map(|r| r.unwrap())
        .filter(|r| r[value].parse::<f64>().unwrap() > 0.0 && r[weight].parse::<f64>().unwrap() < 0.0)
        .count();
    assert!(negative > 0);
}

#[test]
fn every_figure_passes_its_checks() {
    let dir = tempfile::tempdir().unwrap();
    for (id, _) in FIGURE_IDS {
        let prefix = dir.path().join(id);
        stdout(&qprob(&["figure", id, "--format", "json", "--out", prefix.to_str().unwrap()]));
        let env = read_envelope(&prefix);
        env.payload.verify().unwrap_or_else(|e| panic!("{id}: {e}"));
    }
}

#[test]
fn figure_list_names_every_id() {
    let out = stdout(&qprob(&["figure", "--list"]));
    for (id, _) in FIGURE_IDS {
        assert!(out.contains(id), "{id} missing");
    }
}

#[test]
fn check_subcommand_passes() {
    let out = stdout(&qprob(&["check", "--cases", "200", "--seed", "5"]));
    assert!(!out.contains("FAIL"), "{out}");
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| qprob(args).status.code().unwrap();
    // usage and configuration
    assert_eq!(code(&["kdq", "--preset", "nonexistent"]), 1);
    assert_eq!(code(&["kdq", "--preset", "stern_gerlach", "--omega", "2"]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["figure", "fig2", "--grid", "0,1,3"]), 1);
    assert_eq!(code(&["kdq", "--grid", "0,1,3"]), 1);
    // invariant: |rho01|^2 > rho00 rho11
    assert_eq!(code(&["kdq", "--preset", "stern_gerlach", "--rho01", "0.9"]), 2);
    // numerical: a degenerate u-grid cannot be inverted
    assert_eq!(code(&["ramsey", "--grid", "0,0,8"]), 3);
    // io
    assert_eq!(code(&["kdq", "--out", "/nonexistent/dir/x"]), 4);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn scenario_file_with_explicit_operators() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.toml");
    std::fs::write(
        &path,
        r#"
[explicit]
dim = 2
rho = [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]
O1 = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]
O2 = [[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]
"#,
    )
    .unwrap();
    let csv = stdout(&qprob(&["tpm", "--config", path.to_str().unwrap(), "--format", "csv"]));
    assert_eq!(csv.lines().count(), 5);
}
