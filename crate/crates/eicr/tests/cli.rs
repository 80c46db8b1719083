//! End-to-end checks of the command-line binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eicr"))
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("config.txt");
    let contents = format!(
        "output_dir = {}\n\
         run_seeds = 1\n\
         generator.num_predicates = 5\n\
         generator.num_object_classes = 6\n\
         generator.num_scenes = 60\n\
         generator.relations_per_scene = 5\n\
         generator.feature_dim = 8\n\
         split.val_count = 5\n\
         train.total_iterations = 200\n\
         train.checkpoint_every = 100\n\
         train.schedule_t = 50\n\
         eval.ks = 5, 10\n",
        dir.display()
    );
    fs::write(&path, contents).unwrap();
    path
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn pipeline_generate_train_evaluate() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path());

    run_ok(bin().arg("generate").arg("--config").arg(&cfg));
    for name in ["train.csv", "val.csv", "test.csv", "stats.csv"] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }

    run_ok(bin().arg("train").arg("--config").arg(&cfg));
    assert!(dir.path().join("checkpoint_seed1.txt").exists());
    assert!(dir.path().join("history_seed1.csv").exists());

    let out = run_ok(
        bin()
            .arg("evaluate")
            .arg("--config")
            .arg(&cfg)
            .arg("--checkpoint")
            .arg(dir.path().join("checkpoint_seed1.txt")),
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("K=5"), "missing K=5 line: {stdout}");
    assert!(stdout.contains("K=10"), "missing K=10 line: {stdout}");
    let report = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    for metric in ["R,", "mR,", "F,", "mT,"] {
        assert!(
            report.lines().any(|l| l.starts_with(metric)),
            "report.csv missing {metric} rows: {report}"
        );
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        let cfg = write_config(dir.path());
        run_ok(bin().arg("generate").arg("--config").arg(&cfg));
        run_ok(bin().arg("train").arg("--config").arg(&cfg));
    }
    for name in ["train.csv", "test.csv", "checkpoint_seed1.txt", "history_seed1.csv"] {
        let left = fs::read(a.path().join(name)).unwrap();
        let right = fs::read(b.path().join(name)).unwrap();
        assert_eq!(left, right, "{name} differs between reruns");
    }
}

#[test]
fn seed_override_trains_single_run() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path());
    run_ok(bin().arg("generate").arg("--config").arg(&cfg));
    run_ok(
        bin()
            .arg("train")
            .arg("--config")
            .arg(&cfg)
            .arg("--seed")
            .arg("7"),
    );
    assert!(dir.path().join("checkpoint_seed7.txt").exists());
    assert!(!dir.path().join("checkpoint_seed1.txt").exists());
}

#[test]
fn malformed_config_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.txt");
    fs::write(&cfg, "generator.num_predicates = banana\n").unwrap();
    let out = bin().arg("generate").arg("--config").arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.starts_with("error:"), "stderr: {stderr}");
}

#[test]
fn missing_checkpoint_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path());
    run_ok(bin().arg("generate").arg("--config").arg(&cfg));
    let out = bin()
        .arg("evaluate")
        .arg("--config")
        .arg(&cfg)
        .arg("--checkpoint")
        .arg(dir.path().join("nope.txt"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error:"));
}

#[test]
fn schedule_dump_is_non_increasing() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("schedule.csv");
    run_ok(
        bin()
            .arg("schedule-dump")
            .arg("--period")
            .arg("100")
            .arg("--lambda-max")
            .arg("0.9")
            .arg("--t-max")
            .arg("300")
            .arg("--out")
            .arg(&out_path),
    );
    let contents = fs::read_to_string(&out_path).unwrap();
    let mut prev = f64::INFINITY;
    let mut rows = 0;
    for line in contents.lines().skip(1) {
        let lambda: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(lambda <= prev + 1e-15, "lambda increased: {line}");
        assert!((0.1 - 1e-12..=0.9).contains(&lambda), "out of range: {line}");
        prev = lambda;
        rows += 1;
    }
    assert!(rows >= 300, "expected at least 300 rows, got {rows}");
}
