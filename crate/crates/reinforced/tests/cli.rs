//! End-to-end checks of the command-line binary: exit codes, one-line
//! diagnostics, and the output files of each subcommand.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_reinforced"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_cfg(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn no_arguments_prints_usage_and_fails() {
    let out = run(&[]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("usage:"));
}

#[test]
fn unknown_command_fails_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "x.cfg", "family=blobs\ncounts=10,10\nshape=3\n");
    let out = run(&["evaluate", "--config", &cfg]);
    assert!(!out.status.success());
    let err = stderr_of(&out);
    assert!(err.lines().next().unwrap().contains("evaluate"), "{err}");
}

#[test]
fn missing_config_file_fails_cleanly() {
    let out = run(&["generate", "--config", "/nonexistent/path.cfg", "--out", "/tmp/x"]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).starts_with("error: "));
}

#[test]
fn unknown_config_key_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "bad.cfg",
        "family=blobs\ncounts=10,10\nshape=3\nnoize=1.0\n",
    );
    let out = run(&["generate", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("noize"));
}

#[test]
fn generate_then_train_then_report_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path();
    let gen_cfg = write_cfg(base, "gen.cfg", "family=blobs\ncounts=10,10\nshape=3\nnoise=0.4\nseed=8\n");
    let data_out = base.join("data");
    let out = run(&["generate", "--config", &gen_cfg, "--out", data_out.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(data_out.join("data.csv").exists());
    assert!(data_out.join("manifest.txt").exists());

    let train_cfg = write_cfg(
        base,
        "train.cfg",
        &format!(
            "data_file={}\nsplit_seed=1\nmethod=supervised\n\
             network=dense(3,6)|relu|dense(6,2)|softmax(2)\nepochs=4\nseed=3\nsupervised_rate=0.02\n",
            data_out.join("data.csv").display()
        ),
    );
    let run_out = base.join("run");
    let out = run(&["train", "--config", &train_cfg, "--out", run_out.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("optimal epoch"), "{stdout}");
    for f in ["curves.csv", "checkpoint.txt", "manifest.txt"] {
        assert!(run_out.join(f).exists(), "{f} missing");
    }

    let report_out = base.join("report");
    let out = run(&[
        "report",
        "--config",
        run_out.join("manifest.txt").to_str().unwrap(),
        "--out",
        report_out.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let report = fs::read_to_string(report_out.join("report.csv")).unwrap();
    assert!(report.starts_with("method,train_error,val_error,test_error\nSupervised,"));
}

#[test]
fn seed_flag_overrides_the_config_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "gen.cfg",
        "family=blobs\ncounts=10,10\nshape=3\nnoise=0.4\nseed=8\n",
    );
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    assert!(run(&["generate", "--config", &cfg, "--out", out_a.to_str().unwrap()])
        .status
        .success());
    assert!(run(&[
        "generate",
        "--config",
        &cfg,
        "--seed",
        "9",
        "--out",
        out_b.to_str().unwrap()
    ])
    .status
    .success());
    assert_ne!(
        fs::read(out_a.join("data.csv")).unwrap(),
        fs::read(out_b.join("data.csv")).unwrap()
    );
}

#[test]
fn bad_seed_value_is_rejected() {
    let out = run(&["generate", "--config", "x.cfg", "--seed", "zebra"]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("zebra"));
}
