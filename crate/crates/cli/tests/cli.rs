use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn polar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polar"))
        .args(args)
        .env_remove("POLAR_BUDGET")
        .output()
        .expect("binary runs")
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("json line"))
        .collect()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

const SQUARE_GF9: &str = r#"{"tower":{"p":3,"m":1,"w":2},"form":{"kind":"quadratic","matrix":[[1]]},"alpha":1}"#;

#[test]
fn classify_square_over_gf9() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "q.json", SQUARE_GF9);
    let out = polar(&["classify", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json_lines(&out)[0];
    assert_eq!(r["type"], "O+");
    assert_eq!(r["witt_index"], 1);
    assert_eq!(r["singular_count"], 4);
    assert_eq!(r["radical_dim"], 0);
    assert_eq!(r["provenance"]["tower"]["w"], 2);
}

#[test]
fn classify_zero_alpha_is_degenerate() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "q.json",
        r#"{"tower":{"p":3,"m":1,"w":2},"form":{"kind":"quadratic","matrix":[[1]]},"alpha":0}"#,
    );
    let out = polar(&["classify", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json_lines(&out)[0];
    assert_eq!(r["degenerate"], true);
    assert_eq!(r["type"], "degenerate");
}

#[test]
fn classify_hermitian_identity() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "h.json",
        r#"{"tower":{"p":3,"m":1,"w":2},"form":{"kind":"sesquilinear","matrix":[[1]],"sigma_power":1},"alpha":1}"#,
    );
    let out = polar(&["classify", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json_lines(&out)[0];
    assert_eq!(r["reflexive"], "symmetric");
    assert_eq!(r["orthogonal_class"], "O-");
    assert_eq!(r["composed"]["matrix"], serde_json::json!([[[2, 0], [0, 0]], [[0, 0], [2, 0]]]));
}

#[test]
fn predict_examples() {
    let out = polar(&["predict", "--base", "O-", "--q", "2", "--w", "3", "--A", "2", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json_lines(&out)[0];
    assert_eq!(r["type"], "O-");
    assert!(r["embedding"].as_str().unwrap().ends_with("O⁻(6,2)"));

    let out = polar(&["predict", "--base", "O", "--q", "2", "--w", "2", "--A", "3", "--alpha", "1"]);
    assert_eq!(json_lines(&out)[0]["type"], "degenerate");

    let out = polar(&["predict", "--base", "hermitian", "--q", "2", "--w", "2", "--A", "1", "--alpha", "1"]);
    let r = &json_lines(&out)[0];
    assert_eq!(r["type"], "alternating");
    assert!(r["embedding"].as_str().unwrap().contains("Sp"));
}

#[test]
fn predict_all_alpha_lists_every_element() {
    let out = polar(&["predict", "--base", "O", "--q", "3", "--w", "2", "--A", "1", "--alpha", "all", "--gamma", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 9);
    assert_eq!(lines.iter().filter(|r| r["degenerate"] == true).count(), 1);
    assert!(lines.iter().all(|r| r.get("alpha").is_some()));
}

#[test]
fn invalid_input_exits_2() {
    let out = polar(&["predict", "--base", "O", "--q", "6", "--w", "2", "--A", "1", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = polar(&["predict", "--base", "hermitian", "--q", "3", "--w", "3", "--A", "1", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "bad.json", "{");
    let out = polar(&["classify", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = polar(&["classify", "--spec", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_overrun_exits_3() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "q.json", SQUARE_GF9);
    let out = Command::new(env!("CARGO_BIN_EXE_polar"))
        .args(["classify", "--spec", spec.to_str().unwrap()])
        .env("POLAR_BUDGET", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = polar(&["--budget", "2", "classify", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn embed_identity_and_negation() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "q.json", SQUARE_GF9);
    let id = write(&dir, "id.json", "[[1]]");
    let out = polar(&["embed", "--spec", spec.to_str().unwrap(), "--matrix", id.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json_lines(&out)[0];
    assert_eq!(r["is_isometry"], true);
    assert_eq!(r["embedded"], serde_json::json!([[[1, 0], [0, 0]], [[0, 0], [1, 0]]]));

    let neg = write(&dir, "neg.json", "[[-1]]");
    let out = polar(&["embed", "--spec", spec.to_str().unwrap(), "--matrix", neg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_lines(&out)[0]["embedded"], serde_json::json!([[[2, 0], [0, 0]], [[0, 0], [2, 0]]]));
}

#[test]
fn embed_rejects_non_isometry() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "q.json", SQUARE_GF9);
    let i = write(&dir, "i.json", "[[[0,1]]]");
    let out = polar(&["embed", "--spec", spec.to_str().unwrap(), "--matrix", i.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not an isometry"));
}

#[test]
fn embed_samples_when_no_matrix_given() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "q.json",
        r#"{"tower":{"p":3,"m":1,"w":2},"form":{"kind":"quadratic","matrix":[[0,1],[0,0]]},"alpha":[0,1]}"#,
    );
    for seed in ["0", "1", "2"] {
        let out = polar(&["embed", "--spec", spec.to_str().unwrap(), "--seed", seed]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(json_lines(&out)[0]["is_isometry"], true);
    }
}

#[test]
fn verify_small_grid() {
    let dir = TempDir::new().unwrap();
    let grid = write(
        &dir,
        "grid.json",
        r#"{"blocks":[{"q":[3],"w":[2],"A":[1],"bases":["O"],"kind":"quadratic","alpha":"nonzero","gamma":"representatives"}]}"#,
    );
    let report = dir.path().join("report.jsonl");
    let out = polar(&["verify", "--grid", grid.to_str().unwrap(), "--out", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&report).unwrap();
    let cells = text
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap())
        .filter(|r| r.get("summary").is_none())
        .count();
    assert_eq!(cells, 16);
    assert!(String::from_utf8_lossy(&out.stderr).contains("matched 16"));
}

#[test]
fn verify_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let grid = write(
        &dir,
        "grid.json",
        r#"{"blocks":[{"q":[3],"w":[2],"A":[2],"bases":["O+","O-"],"kind":"quadratic","samples":2}]}"#,
    );
    let a = polar(&["verify", "--grid", grid.to_str().unwrap(), "--seed", "7"]);
    let b = polar(&["verify", "--grid", grid.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_reports_skipped_cells() {
    let dir = TempDir::new().unwrap();
    let grid = write(
        &dir,
        "grid.json",
        r#"{"blocks":[{"q":[3],"w":[2],"A":[2],"bases":["O+"],"kind":"quadratic"}]}"#,
    );
    let out = polar(&["--budget", "10", "verify", "--grid", grid.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("skipped"));
}

#[test]
fn verify_default_grid_covers_every_row() {
    let out = polar(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("mismatched 0"));
    assert!(!stderr.contains("rows not exercised"));
}
