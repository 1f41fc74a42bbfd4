//! End-to-end checks of the command-line interface: file round trips,
//! exit codes and output formats.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const TOY: &str = "A B D E +\nB C E -\nA B D E +\nA B C E -\nA B C D E +\nB C D -\n";

fn capmine(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capmine"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn train_writes_two_rule_model() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "toy.txt", TOY);
    let model = dir.path().join("toy.model");

    let out = capmine(&[
        "train",
        "--input",
        &input,
        "--model",
        model.to_str().unwrap(),
        "--minsup",
        "0.3",
        "--minconf",
        "0.51",
        "--minchi2",
        "0",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let text = fs::read_to_string(&model).unwrap();
    let rule_lines: Vec<&str> = text.lines().skip(4).collect();
    assert_eq!(rule_lines.len(), 2);
    assert!(text.starts_with("#capmodel v1\n"));
}

#[test]
fn train_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "toy.txt", TOY);
    let m1 = dir.path().join("a.model");
    let m2 = dir.path().join("b.model");
    for m in [&m1, &m2] {
        let out = capmine(&[
            "train",
            "--input",
            &input,
            "--model",
            m.to_str().unwrap(),
            "--minsup",
            "0.3",
            "--minchi2",
            "0",
            "--partitions",
            "3",
            "--seed",
            "9",
        ]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&m1).unwrap(), fs::read(&m2).unwrap());
}

#[test]
fn train_rejects_out_of_range_minsup_as_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "toy.txt", TOY);
    let out = capmine(&[
        "train",
        "--input",
        &input,
        "--model",
        "/dev/null",
        "--minsup",
        "1.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn missing_input_is_runtime_error() {
    let out = capmine(&[
        "train",
        "--input",
        "/nonexistent/data.txt",
        "--model",
        "/dev/null",
        "--minsup",
        "0.3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), 1, "single-line diagnostic: {err}");
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = capmine(&["train", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn predict_scores_match_hand_derived_vectors() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "toy.txt", TOY);
    let model = dir.path().join("toy.model");
    let out = capmine(&[
        "train",
        "--input",
        &input,
        "--model",
        model.to_str().unwrap(),
        "--minsup",
        "0.3",
        "--minconf",
        "0.51",
        "--minchi2",
        "0",
    ]);
    assert!(out.status.success());

    let records = write(dir.path(), "records.txt", "A C E\nA D\nB\n");
    let scores = dir.path().join("scores.tsv");
    let out = capmine(&[
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--input",
        &records,
        "--output",
        scores.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let text = fs::read_to_string(&scores).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "record_index\tpred\tscore_+\tscore_-");
    assert_eq!(lines[1], "0\t-\t0.250000\t0.750000");
    assert_eq!(lines[2], "1\t+\t1.000000\t0.000000");
    assert_eq!(lines[3], "2\t+\t0.500000\t0.500000");
}

#[test]
fn predict_handles_unknown_items_with_a_clean_exit() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "toy.txt", TOY);
    let model = dir.path().join("toy.model");
    capmine(&[
        "train",
        "--input",
        &input,
        "--model",
        model.to_str().unwrap(),
        "--minsup",
        "0.3",
        "--minconf",
        "0.51",
        "--minchi2",
        "0",
    ]);
    let records = write(dir.path(), "records.txt", "A D UNSEEN\nZZZ\n");
    let out = capmine(&[
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--input",
        &records,
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    // Unknown items never match: first record still fires {A,D} => +,
    // the second falls back to the priors.
    assert!(text.contains("0\t+\t1.000000\t0.000000"));
    assert!(text.contains("1\t+\t0.500000\t0.500000"));
}

#[test]
fn inspect_prints_rules_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "toy.txt", TOY);
    let model = dir.path().join("toy.model");
    capmine(&[
        "train",
        "--input",
        &input,
        "--model",
        model.to_str().unwrap(),
        "--minsup",
        "0.3",
        "--minconf",
        "0.51",
        "--minchi2",
        "0",
    ]);
    let out = capmine(&["inspect", model.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("A, D => + (sup=0.500, conf=1.000, chi2=6.000)"));
    assert!(text.contains("C => - (sup=0.500, conf=0.750, chi2=3.000)"));
    assert!(text.contains("priors: +=0.500, -=0.500"));
}

#[test]
fn inspect_empty_model_mentions_priors_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "tiny.txt", "X +\nY -\n");
    let model = dir.path().join("tiny.model");
    let out = capmine(&[
        "train",
        "--input",
        &input,
        "--model",
        model.to_str().unwrap(),
        "--minsup",
        "1.0",
    ]);
    assert!(out.status.success());
    let out = capmine(&["inspect", model.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("no rules"));
}

#[test]
fn inspect_corrupt_model_fails_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "bad.model", "#capmodel v1\nlabels:\t+\t-\ngarbage\n");
    let out = capmine(&["inspect", &model]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("3"));
}

#[test]
fn crossval_reports_per_fold_metrics() {
    let dir = tempfile::tempdir().unwrap();
    // Separable data: item s decides the label.
    let mut content = String::new();
    for i in 0..60 {
        if i % 2 == 0 {
            content.push_str(&format!("s n{} +\n", i % 3));
        } else {
            content.push_str(&format!("n{} -\n", i % 3));
        }
    }
    let input = write(dir.path(), "sep.txt", &content);
    let out = capmine(&[
        "crossval",
        "--input",
        &input,
        "--minsup",
        "0.1",
        "--minchi2",
        "0",
        "--folds",
        "3",
        "--tsv",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "fold\tauroc\taccuracy\tn_test");
    assert_eq!(lines.len(), 5); // header + 3 folds + mean
    assert!(lines[4].starts_with("mean\t"));
}

#[test]
fn eval_holdout_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let mut content = String::new();
    for i in 0..50 {
        if i % 2 == 0 {
            content.push_str(&format!("s n{} +\n", i % 4));
        } else {
            content.push_str(&format!("n{} -\n", i % 4));
        }
    }
    let input = write(dir.path(), "sep.txt", &content);
    let out = capmine(&[
        "eval",
        "--input",
        &input,
        "--minsup",
        "0.1",
        "--minchi2",
        "0",
        "--holdout",
        "0.3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("mean"));
}

#[test]
fn tabular_input_trains() {
    let dir = tempfile::tempdir().unwrap();
    let mut content = String::new();
    for i in 0..20 {
        if i % 2 == 0 {
            content.push_str("red,round,+\n");
        } else {
            content.push_str(&format!("blue,shape{},-\n", i % 3));
        }
    }
    let input = write(dir.path(), "tab.csv", &content);
    let model = dir.path().join("tab.model");
    let out = capmine(&[
        "train",
        "--input",
        &input,
        "--format",
        "tabular",
        "--label-column",
        "2",
        "--minsup",
        "0.2",
        "--minchi2",
        "0",
        "--model",
        model.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&model).unwrap();
    assert!(text.contains("col0=red"));
}

#[test]
fn hidden_oracle_subcommand_mines_the_full_car_set() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "toy.txt", TOY);
    let out = capmine(&[
        "mine-oracle",
        "--input",
        &input,
        "--minsup",
        "0.3",
        "--minconf",
        "0.51",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("18 rules\n"));
}
