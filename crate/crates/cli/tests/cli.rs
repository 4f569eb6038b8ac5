//! End-to-end tests against the built binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn qflag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qflag"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn coeff_example() {
    let out = qflag(&["coeff", "213", "213", "321"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "q1");
}

#[test]
fn gw_example() {
    let out = qflag(&["gw", "213", "213", "321", "1", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "1");
    let out = qflag(&["gw", "213", "213", "321", "0", "1"]);
    assert_eq!(stdout(&out).trim(), "0");
}

#[test]
fn product_unit_example() {
    let out = qflag(&["product", "123", "213"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "s[213]");
    let out = qflag(&["product", "213", "213"]);
    assert_eq!(stdout(&out).trim(), "s[312] + q1*s[123]");
}

#[test]
fn product_json_shape() {
    let out = qflag(&["product", "213", "213", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(v["terms"][0]["w"], "312");
    assert_eq!(v["terms"][1]["poly"][0]["exps"][0], 1);
}

#[test]
fn verify_cyclic_exhaustive() {
    let out = qflag(&["verify", "cyclic", "3", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v[0]["tested"], 216);
    assert_eq!(v[0]["failed"], 0);
    assert_eq!(v[0]["profile"]["factor_index_order"], "transposed");
}

#[test]
fn verify_graph_rank_five() {
    let out = qflag(&["verify", "graph", "5"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("failed=0"));
}

#[test]
fn verify_guard_blocks_big_ranks() {
    let out = qflag(&["verify", "axioms", "6"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--max-n"));
}

#[test]
fn graph_dot_matches_figure_counts() {
    let out = qflag(&["graph", "transition", "3", "--dot"]);
    let dot = stdout(&out);
    assert_eq!(dot.matches("->").count(), 15);
    let out = qflag(&["graph", "bruhat", "3", "--dot"]);
    assert_eq!(stdout(&out).matches("->").count(), 8);
}

#[test]
fn reduce_example() {
    let out = qflag(&["reduce", "213", "132", "132", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["kind"], "classical");
    assert_eq!(v["value"], "1");
    assert_eq!(v["monomial"], "1");
    assert_eq!(v["shift"], serde_json::json!([0, 0, 0]));
}

#[test]
fn parse_errors_exit_two_with_position() {
    let out = qflag(&["coeff", "2x3", "213", "321"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("position 1"));
    let out = qflag(&["coeff", "213", "21", "321"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn negative_degree_rejected() {
    let out = qflag(&["gw", "21", "21", "21", "--", "-1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn cache_round_trip_is_byte_identical() {
    let dir = std::env::temp_dir().join("qflag-cli-cache");
    std::fs::create_dir_all(&dir).unwrap();
    let path: PathBuf = dir.join("t3.json");
    let _ = std::fs::remove_file(&path);
    let path_str = path.to_str().unwrap();

    let built = qflag(&["table", "3", "--cache", path_str]);
    assert_eq!(code(&built), 0);
    assert!(stdout(&built).contains("built table n=3"));
    let bytes_first = std::fs::read(&path).unwrap();

    let loaded = qflag(&["table", "3", "--cache", path_str]);
    assert!(stdout(&loaded).contains("loaded table n=3"));

    // answers through the cache match the fresh engine, byte for byte
    let fresh = qflag(&["coeff", "213", "213", "321"]);
    let cached = qflag(&["coeff", "213", "213", "321", "--cache", path_str]);
    assert_eq!(stdout(&fresh), stdout(&cached));
    assert_eq!(bytes_first, std::fs::read(&path).unwrap());
}

#[test]
fn cache_env_var_is_honoured() {
    let dir = std::env::temp_dir().join("qflag-cli-cache-env");
    std::fs::create_dir_all(&dir).unwrap();
    let _ = std::fs::remove_file(dir.join("qflag-table-2.json"));
    let out = Command::new(env!("CARGO_BIN_EXE_qflag"))
        .args(["table", "2"])
        .env("QFLAG_CACHE_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(dir.join("qflag-table-2.json").exists());
}

#[test]
fn output_is_deterministic_across_jobs_settings() {
    let a = qflag(&["verify", "axioms", "3", "--jobs", "1", "--format", "json"]);
    let b = qflag(&["verify", "axioms", "3", "--jobs", "4", "--format", "json"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(code(&a), 0);
}
