//! End-to-end tests of the `scinol` binary: every subcommand, the exit-code
//! contract, and byte-level determinism of the emitted artifacts.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn scinol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scinol"))
        .args(args)
        .output()
        .expect("spawning the scinol binary")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

fn synth(dir: &Path, train: usize, test: usize, seed: u64) -> (String, String, String) {
    let train_path = path_str(dir, "train.svm");
    let test_path = path_str(dir, "test.svm");
    let sidecar = path_str(dir, "toy.json");
    let out = scinol(&[
        "synth",
        "--train",
        &train.to_string(),
        "--test",
        &test.to_string(),
        "--seed",
        &seed.to_string(),
        "--out-train",
        &train_path,
        "--out-test",
        &test_path,
        "--sidecar",
        &sidecar,
    ]);
    stdout_of(&out);
    (train_path, test_path, sidecar)
}

#[test]
fn synth_run_verify_bound_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test, sidecar) = synth(dir.path(), 150, 60, 5);

    let metrics = path_str(dir.path(), "metrics.csv");
    let history = path_str(dir.path(), "history.json");
    let run_args = [
        "run",
        "--train",
        &train,
        "--test",
        &test,
        "--learner",
        "scinol1",
        "--epsilon",
        "1",
        "--metrics",
        &metrics,
        "--history",
        &history,
        "--comparator",
        &sidecar,
        "--metric-every",
        "25",
    ];
    let summary = stdout_of(&scinol(&run_args));
    assert!(summary.contains("final_avg_test_loss:"));
    assert!(summary.contains("final_cum_regret:"));

    let metrics_text = fs::read_to_string(&metrics).unwrap();
    assert!(metrics_text
        .starts_with("step,epoch,avg_test_loss,test_accuracy,cum_train_loss,cum_regret\n"));
    // 150 trials at cadence 25: rows at 25, 50, ..., 150; the epoch end
    // coincides with the last cadence row and is not duplicated.
    assert_eq!(metrics_text.lines().count(), 1 + 6);

    // Reruns are byte-identical.
    let history_text = fs::read_to_string(&history).unwrap();
    stdout_of(&scinol(&run_args));
    assert_eq!(fs::read_to_string(&metrics).unwrap(), metrics_text);
    assert_eq!(fs::read_to_string(&history).unwrap(), history_text);

    let report = path_str(dir.path(), "report.json");
    let verify_out = stdout_of(&scinol(&[
        "verify",
        "--history",
        &history,
        "--grid",
        "40x40",
        "--points",
        "1500",
        "--json",
        &report,
    ]));
    let pass_lines = verify_out.lines().filter(|l| l.starts_with("PASS ")).count();
    assert_eq!(pass_lines, 4, "verify output:\n{verify_out}");
    assert!(!verify_out.contains("FAIL"));
    let report_json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(report_json.as_array().unwrap().len(), 4);

    let bound_out = stdout_of(&scinol(&["bound", "--history", &history, "--comparator", &sidecar]));
    assert!(bound_out.contains("learner: scinol1"));
    assert!(bound_out.contains("within_bound: true"), "{bound_out}");
}

#[test]
fn unknown_flags_exit_2_and_io_failures_exit_1() {
    let out = scinol(&["run", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));

    let out = scinol(&["stats", "--data", "/nonexistent/data.svm"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn tampered_history_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let (train, _test, _) = synth(dir.path(), 40, 10, 9);
    let history = path_str(dir.path(), "history.json");
    stdout_of(&scinol(&[
        "run",
        "--train",
        &train,
        "--learner",
        "scinol2",
        "--epsilon",
        "1",
        "--history",
        &history,
    ]));

    let mut doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&history).unwrap()).unwrap();
    let w = &mut doc["trials"][5]["w"][0][1];
    *w = serde_json::json!(w.as_f64().unwrap() * 1.5 + 0.125);
    fs::write(&history, serde_json::to_string(&doc).unwrap()).unwrap();

    let out = scinol(&["verify", "--history", &history, "--grid", "4x4", "--points", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn scinol_runs_take_no_rate_and_baselines_require_one() {
    let dir = tempfile::tempdir().unwrap();
    let (train, _, _) = synth(dir.path(), 30, 10, 2);

    let out = scinol(&["run", "--train", &train, "--learner", "scinol1", "--epsilon", "1"]);
    assert!(out.status.success());

    let out = scinol(&[
        "run", "--train", &train, "--learner", "scinol1", "--epsilon", "1", "--eta", "0.1",
    ]);
    assert_eq!(out.status.code(), Some(1));

    let out = scinol(&["run", "--train", &train, "--learner", "adam"]);
    assert_eq!(out.status.code(), Some(1));

    let out = scinol(&["run", "--train", &train, "--learner", "adam", "--eta", "0.05"]);
    assert!(out.status.success());
}

#[test]
fn ogd_reads_per_dim_rates_from_json() {
    let dir = tempfile::tempdir().unwrap();
    let (train, _, _) = synth(dir.path(), 30, 10, 4);
    let rates = path_str(dir.path(), "rates.json");
    fs::write(&rates, serde_json::to_string(&vec![0.1; 21]).unwrap()).unwrap();

    let out = scinol(&["run", "--train", &train, "--learner", "ogd", "--rates", &rates]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    // A rates file of the wrong length is rejected.
    fs::write(&rates, serde_json::to_string(&vec![0.1; 3]).unwrap()).unwrap();
    let out = scinol(&["run", "--train", &train, "--learner", "ogd", "--rates", &rates]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn stats_summarizes_libsvm_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (train, _, _) = synth(dir.path(), 50, 10, 7);
    let out = stdout_of(&scinol(&["stats", "--data", &train]));
    assert!(out.contains("records: 50"));
    assert!(out.contains("features: 21"));
    assert!(out.contains("label_kind: binary"));
    assert!(out.contains("scale_ratio: "));

    let csv = path_str(dir.path(), "tiny.csv");
    fs::write(&csv, "f1,f2,y\n1.0,2.0,1\n0.5,-1.0,-1\n4.0,0.0,1\n").unwrap();
    let out = stdout_of(&scinol(&["stats", "--data", &csv, "--has-header"]));
    assert!(out.contains("records: 3"));
    assert!(out.contains("features: 2"));
    assert!(out.contains("label_kind: binary"));
}

#[test]
fn cross_entropy_needs_classes_and_a_multivariate_learner() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path_str(dir.path(), "multi.csv");
    fs::write(&csv, "1.0,0.0,0\n0.0,1.0,1\n1.0,1.0,2\n0.5,0.0,0\n0.0,0.5,1\n").unwrap();

    let out = scinol(&[
        "run", "--train", &csv, "--learner", "scinol2", "--epsilon", "1", "--loss",
        "cross-entropy",
    ]);
    assert_eq!(out.status.code(), Some(1), "missing --classes must fail");

    let out = scinol(&[
        "run", "--train", &csv, "--learner", "scinol2", "--epsilon", "1", "--loss",
        "cross-entropy", "--classes", "3",
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let out = scinol(&[
        "run", "--train", &csv, "--learner", "sgd", "--eta", "0.1", "--loss", "cross-entropy",
        "--classes", "3",
    ]);
    assert_eq!(out.status.code(), Some(1), "baselines are scalar-only");
}
