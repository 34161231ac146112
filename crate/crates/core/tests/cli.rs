use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use isokernel::dataset::write_libsvm;
use isokernel::synth;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_isokernel"));
    c.env("ISOKERNEL_THREADS", "2");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_data(dir: &Path, name: &str, n: usize, seed: u64) -> PathBuf {
    let path = dir.join(name);
    let d = synth::disc(n, 0.3, 0.0, seed);
    write_libsvm(&d, fs::File::create(&path).unwrap()).unwrap();
    path
}

#[test]
fn inspect_reports_fit_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_data(dir.path(), "train.svm", 200, 1);
    let map = dir.path().join("map.json");
    let out = run(&[
        "fit-map", "--data", p(&data), "--scheme", "anne", "--psi", "32", "--t", "40", "--seed", "77", "--out", p(&map),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["inspect", "--map", p(&map)]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("scheme: anne"));
    assert!(text.contains("t: 40\n"));
    assert!(text.contains("psi: 32\n"));
    assert!(text.contains("seed: 77\n"));
    let counts = text.lines().find(|l| l.starts_with("cell_counts: ")).unwrap();
    assert_eq!(counts.trim_start_matches("cell_counts: ").split(',').count(), 40);
}

#[test]
fn transform_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_data(dir.path(), "train.svm", 150, 2);
    let other = write_data(dir.path(), "other.svm", 73, 3);
    let map = dir.path().join("map.json");
    let csv = dir.path().join("phi.csv");
    assert!(run(&["fit-map", "--data", p(&data), "--psi", "16", "--t", "10", "--out", p(&map)]).status.success());
    let out = run(&["transform", "--map", p(&map), "--data", p(&other), "--out", p(&csv)]);
    assert!(out.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 73);
    assert_eq!(lines[0].split(',').count(), 11);
    for row in &lines[1..] {
        let cells: Vec<u32> = row.split(',').skip(1).map(|c| c.parse().unwrap()).collect();
        assert!(cells.iter().all(|&c| c < 16));
    }
}

#[test]
fn train_then_inspect_model() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_data(dir.path(), "train.svm", 200, 4);
    let model = dir.path().join("model.json");
    let out = run(&[
        "train", "--data", p(&data), "--learner", "nogd", "--psi", "16", "--b", "30", "--r", "6", "--out", p(&model),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(run(&["inspect", "--model", p(&model)]).stdout).unwrap();
    assert!(text.contains("learner: nogd"));
    assert!(text.contains("b: 30"));
}

#[test]
fn eval_commands_write_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let train = write_data(dir.path(), "a.svm", 300, 5);
    let test = write_data(dir.path(), "a.t.svm", 200, 6);
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "learner = ogd\nt = 5\npsi_grid = 4,16\nblock_size = 50\nseed = 3\n").unwrap();
    let csv = dir.path().join("blocks.csv");
    let json = dir.path().join("summary.json");
    let out = run(&[
        "eval-online", "--data", p(&train), p(&test), "--config", p(&conf), "--learner", "ik-ogd-anne", "--out", p(&csv),
        "--json", p(&json),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 1 + 4);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["config"]["learner"], "ik-ogd-anne");
    assert_eq!(v["config"]["t"], 5);
    assert_eq!(v["config"]["seed"], 3);
    assert_eq!(v["config"]["initial_train"], 300);
    assert_eq!(v["n_predictions"], 200);

    let out = run(&[
        "eval-batch", "--train", p(&train), "--test", p(&test), "--learner", "ik-ogd-iforest", "--psi-grid", "4,8",
        "--t", "20", "--out", p(&csv),
    ]);
    assert!(out.status.success());

    let sweep_csv = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep", "--axis", "t", "--values", "5,20", "--train", p(&train), "--test", p(&test), "--psi", "8", "--out",
        p(&sweep_csv),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&sweep_csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().contains(",t,5,"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["fit-map", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
    let missing = dir.path().join("missing.svm");
    let out = run(&["fit-map", "--data", p(&missing), "--psi", "4", "--out", p(&dir.path().join("m"))]);
    assert_eq!(out.status.code(), Some(2));
    let bad = dir.path().join("bad.svm");
    fs::write(&bad, "+1 3:0.5 2:1\n").unwrap();
    let out = run(&["fit-map", "--data", p(&bad), "--psi", "1", "--out", p(&dir.path().join("m"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    let data = write_data(dir.path(), "ok.svm", 50, 7);
    let out = run(&["eval-batch", "--train", p(&data), "--test", p(&data), "--eta", "-1", "--out", p(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["fit-map", "--data", p(&data), "--psi", "500", "--out", p(&dir.path().join("m"))]);
    assert_eq!(out.status.code(), Some(2));
}
