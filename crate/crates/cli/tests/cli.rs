use std::path::Path;
use std::process::{Command, Output};

use invkb_core::oracle::{CayleyGraph, DistanceTable};
use invkb_core::perm::Permutation;
use invkb_core::presentation::{length_weighted_presentation, Precedence};
use tempfile::TempDir;

const LINEAR_SEVEN: &str = "A\t(1,4)(3,7,6)\nB\t(1,3,7,5,2,6,4)\nC\t(3,4,6)\nD\t(1,7,6,4,2,3,5)\n";
const CIRCULAR_EIGHT: &str = "A\t(2,3)(6,8)\nB\t(1,7,6,8)(4,5)\nC\t(1,5,6,4,3,8,7)\nD\t(1,2,4)(5,6,7)\n";

fn invkb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invkb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = path(dir, name);
    std::fs::write(&p, text).unwrap();
    p
}

fn complete_to(dir: &TempDir, name: &str, model: &[&str]) -> String {
    let out = path(dir, name);
    let mut args = vec!["complete"];
    args.extend_from_slice(model);
    args.extend_from_slice(&["--out", &out]);
    let o = invkb(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    out
}

#[test]
fn complete_reports_rule_counts() {
    let o = invkb(&["complete", "--model", "linear", "--n", "3", "--weights", "length"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rules: 9\n"));
    let o = invkb(&["complete", "--model", "coxeter", "--n", "2"]);
    assert!(stdout(&o).contains("rules: 1\n"));
    let o = invkb(&["complete", "--model", "linear", "--n", "5", "--precedence", "ij"]);
    assert!(stdout(&o).contains("rules: 216\n"));
}

#[test]
fn rule_files_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = complete_to(&dir, "a.json", &["--model", "linear", "--n", "4"]);
    let b = complete_to(&dir, "b.json", &["--model", "linear", "--n", "4"]);
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["status"], "confluent");
    assert_eq!(v["rules"].as_array().unwrap().len(), 44);
    assert_eq!(v["order"]["precedence"][0], "t1_2");
}

#[test]
fn limits_exit_one_and_write_raw_partial() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "partial.json");
    let o = invkb(&["complete", "--model", "linear", "--n", "4", "--max-rules", "12", "--out", &out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("max_rules"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["status"], "raw");
    // a raw system cannot answer distance queries
    let o = invkb(&["dist", "--rules", &out, "--from", "()", "--to", "(1,2)"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dist_outputs() {
    let dir = TempDir::new().unwrap();
    let rules = complete_to(&dir, "l7.json", &["--model", "linear", "--n", "7"]);
    let o = invkb(&["dist", "--rules", &rules, "--from", "(1,2)", "--to", "(1,2)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "distance: 0 (0.000000)\nwitness: \n");

    let o = invkb(&["dist", "--rules", &rules, "--from", "()", "--to", "(1,4)(3,7,6)"]);
    assert_eq!(o.status.code(), Some(0));
    let pres = length_weighted_presentation(7, Precedence::WeightIJ).unwrap();
    let table = DistanceTable::weighted(&CayleyGraph::new(pres.generators()).unwrap());
    let expected = table.get(&Permutation::parse("(1,4)(3,7,6)", 7).unwrap()).unwrap();
    let first = stdout(&o).lines().next().unwrap().to_string();
    assert!(first.starts_with(&format!("distance: {expected} (")), "{first}");

    let o = invkb(&["dist", "--rules", &rules, "--from", "(1,4", "--to", "()"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error"));

    // matrix from the saved rules
    let genomes = write(&dir, "linear7.tsv", LINEAR_SEVEN);
    let o = invkb(&["matrix", "--rules", &rules, "--genomes", &genomes, "--tree"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("4\nA         0.000000 8.000000 7.000000 7.000000\n"), "{text}");
    assert!(stderr(&o).contains("split: A,C|B,D"));
    assert!(text.ends_with(";\n"));
}

#[test]
fn matrix_with_oracles() {
    let dir = TempDir::new().unwrap();
    let genomes = write(&dir, "linear7.tsv", LINEAR_SEVEN);
    let o = invkb(&["matrix", "--model", "linear", "--n", "7", "--genomes", &genomes, "--oracle", "unit", "--tree"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("split: A,B|C,D"));
    let o = invkb(&["matrix", "--model", "coxeter", "--n", "7", "--genomes", &genomes, "--oracle", "coxeter"]);
    assert!(stdout(&o).contains("A         0.000000 15.000000 9.000000 11.000000"));
}

#[test]
fn circular_matrix_matches_oracle() {
    let dir = TempDir::new().unwrap();
    let genomes = write(&dir, "circular8.tsv", CIRCULAR_EIGHT);
    let rewrite = path(&dir, "rewrite.phy");
    let oracle = path(&dir, "oracle.phy");
    let o = invkb(&[
        "matrix", "--model", "circular", "--n", "8", "--genomes", &genomes, "--circular", "--out", &rewrite,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = invkb(&[
        "matrix", "--model", "circular", "--n", "8", "--genomes", &genomes, "--circular", "--oracle", "weighted",
        "--out", &oracle,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let a = std::fs::read_to_string(&rewrite).unwrap();
    assert_eq!(a, std::fs::read_to_string(&oracle).unwrap());

    let tree = path(&dir, "t.nwk");
    let o = invkb(&["tree", "--matrix", &rewrite, "--out", &tree]);
    assert_eq!(o.status.code(), Some(0));
    assert!(Path::new(&tree).exists());
    assert!(std::fs::read_to_string(&tree).unwrap().ends_with(";\n"));
}

#[test]
fn matrix_needs_enough_genomes() {
    let dir = TempDir::new().unwrap();
    let genomes = write(&dir, "one.tsv", "A\t(1,2)\n");
    let o = invkb(&["matrix", "--model", "coxeter", "--n", "3", "--genomes", &genomes]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_verification() {
    let o = invkb(&["oracle", "--model", "linear", "--n", "4", "--verify-all"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("24/24 match"));
    let o = invkb(&["oracle", "--model", "coxeter", "--n", "5", "--verify-all"]);
    assert!(stdout(&o).contains("120/120 match"));
    assert!(stdout(&o).contains("every distance equals the inversion count"));
    let o = invkb(&["oracle", "--model", "circular", "--n", "5", "--verify-all", "--circular"]);
    assert!(stdout(&o).contains("120/120 match"));
    let o = invkb(&["oracle", "--model", "linear", "--n", "6", "--sample", "50", "--seed", "3"]);
    assert!(stdout(&o).contains("50/50 match"));
    let o = invkb(&["oracle", "--model", "coxeter", "--n", "9", "--verify-all"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("exceeds"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(invkb(&[]).status.code(), Some(2));
    assert_eq!(invkb(&["complete", "--n", "3"]).status.code(), Some(2));
    assert_eq!(invkb(&["complete", "--model", "warp", "--n", "3"]).status.code(), Some(2));
    assert_eq!(invkb(&["complete", "--model", "circular", "--n", "2"]).status.code(), Some(2));
    assert_eq!(invkb(&["oracle", "--model", "linear", "--n", "3"]).status.code(), Some(2));
    assert_eq!(invkb(&["dist", "--rules", "/nonexistent.json", "--from", "()", "--to", "()"]).status.code(), Some(2));
}

#[test]
fn model_file_input() {
    let dir = TempDir::new().unwrap();
    let model = write(
        &dir,
        "m.json",
        r#"{"n": 3, "generators": [
            {"label": "a", "cycles": "(1,2)", "weight": 1},
            {"label": "b", "cycles": "(2,3)", "weight": 1},
            {"label": "c", "cycles": "(1,3)", "weight": "3/2"}]}"#,
    );
    let o = invkb(&["complete", "--model-file", &model]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = invkb(&["dist", "--model-file", &model, "--from", "()", "--to", "(1,3)"]);
    assert_eq!(stdout(&o), "distance: 3/2 (1.500000)\nwitness: c\n");
    let bad = write(&dir, "bad.json", r#"{"n": 3, "generators": [{"label": "r", "cycles": "(1,2,3)", "weight": 1}]}"#);
    assert_eq!(invkb(&["complete", "--model-file", &bad]).status.code(), Some(2));
}
