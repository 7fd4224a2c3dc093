use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn covrt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covrt")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&covrt(&["--help"])), 0);
    assert_eq!(code(&covrt(&["--version"])), 0);
    assert_eq!(code(&covrt(&[])), 1);
    assert_eq!(code(&covrt(&["fit"])), 1);
    assert_eq!(code(&covrt(&["train", "--data", "x.csv"])), 1);
    assert_eq!(code(&covrt(&["verify", "lemma9"])), 1);
    assert_eq!(code(&covrt(&["simulate", "--dgp", "model9", "--n", "5"])), 1);
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.csv");
    assert_eq!(code(&covrt(&["train", "--data", path(&missing), "--target", "y"])), 2);

    let blank = dir.path().join("blank.csv");
    fs::write(&blank, "x,y\n1,2\n,3\n").unwrap();
    let out = covrt(&["train", "--data", path(&blank), "--target", "y"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 3"), "{}", String::from_utf8_lossy(&out.stderr));

    let garbage = dir.path().join("model.json");
    fs::write(&garbage, "{\"format_version\": 7}").unwrap();
    assert_eq!(code(&covrt(&["predict", "--model", path(&garbage), "--data", path(&blank)])), 2);

    let out = covrt(&["experiment", "table2", "--data-dir", path(dir.path()), "--datasets", "abalone"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("abalone.csv"));
}

#[test]
fn simulate_train_predict_evaluate_prune() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("train.csv");
    let valid = dir.path().join("valid.csv");
    let model = dir.path().join("model.json");
    let pruned = dir.path().join("pruned.json");
    let preds = dir.path().join("pred.csv");

    let sim = |file: &Path, seed: &str| {
        let out = covrt(&["simulate", "--dgp", "model3", "--n", "300", "--seed", seed, "--out", path(file)]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    };
    sim(&train, "1");
    sim(&valid, "2");
    let header = fs::read_to_string(&train).unwrap();
    assert!(header.starts_with("x1,x2,"), "{}", &header[..40]);

    let out = covrt(&["train", "--data", path(&train), "--target", "y", "--depth", "4", "--out", path(&model)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let out = covrt(&["predict", "--model", path(&model), "--data", path(&valid), "--out", path(&preds)]);
    assert_eq!(code(&out), 0);
    let lines: Vec<String> = fs::read_to_string(&preds).unwrap().lines().map(String::from).collect();
    assert_eq!(lines[0], "prediction");
    assert_eq!(lines.len(), 301);

    let out = covrt(&["evaluate", "--model", path(&model), "--data", path(&valid), "--target", "y"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row[0], 300.0);
    assert!(row[1] > 0.0 && row[2] < 1.0);

    let out = covrt(&[
        "prune", "--model", path(&model), "--data", path(&train), "--target", "y", "--validation", path(&valid),
        "--out", path(&pruned),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = covrt(&["prune", "--model", path(&model), "--data", path(&train), "--target", "y", "--leaves", "3"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("3 leaves"));
}

#[test]
fn verify_passes_and_experiments_are_reproducible() {
    let out = covrt(&["verify", "prop1", "--reps", "50"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 51);

    let run = || covrt(&["experiment", "fig-density", "--reps", "20", "--seed", "5"]).stdout;
    let first = run();
    assert!(first.starts_with(b"experiment,dataset,method,depth_or_leaves,metric,value,replication,seed\n"));
    assert_eq!(first, run());
}
