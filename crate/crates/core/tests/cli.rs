use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn winpar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_winpar")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("winpar-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn gallery(name: &str) -> String {
    let path = scratch(&format!("{name}.game"));
    let path = path.to_str().unwrap().to_string();
    json(&winpar(&["gallery", "--name", name, "--out", &path]));
    path
}

#[test]
fn check_matches_fig4() {
    let f = gallery("fig4");
    for (obj, lambda, direct, holds) in [
        ("fixpr", "3", true, true),
        ("fixwp", "4", true, true),
        ("fixwp", "3", true, false),
        ("fixwp", "4", false, true),
    ] {
        let mut args = vec!["check", "--file", &f, "--obj", obj, "--lambda", lambda, "--lasso", "v0 v1 | v2 v3 v0 v1"];
        if direct {
            args.push("--direct");
        }
        let out = json(&winpar(&args));
        assert_eq!(out["holds"], holds, "{obj} {lambda}");
    }
}

#[test]
fn solve_then_verify() {
    let f = gallery("fig6");
    let s = scratch("fig6.strategy");
    let s = s.to_str().unwrap();
    let out = json(&winpar(&["solve", "--file", &f, "--obj", "fixpr", "--lambda", "4", "--strategy", s]));
    assert_eq!(out["winners"]["v0"], "P1");
    assert!(out["strategy"]["memory"].as_u64().unwrap() >= 2);
    let out =
        json(&winpar(&["verify", "--file", &f, "--obj", "fixpr", "--lambda", "4", "--strategy", s, "--init", "v0"]));
    assert_eq!(out["winning"], true);
    let out =
        json(&winpar(&["verify", "--file", &f, "--obj", "fixpr", "--lambda", "2", "--strategy", s, "--init", "v0"]));
    assert_eq!(out["winning"], false);
    assert!(out["counterexample"].is_string());
}

#[test]
fn fig5_regions_and_routes() {
    let f = gallery("fig5");
    let out = json(&winpar(&["solve", "--file", &f, "--obj", "parity", "--all"]));
    assert_eq!(out["regions"]["P1"], serde_json::json!(["v0", "v1", "v2"]));
    for via in ["product", "rr"] {
        let out = json(&winpar(&["solve", "--file", &f, "--obj", "bndwp", "--via", via]));
        assert_eq!(out["winners"]["v0"], "P2");
    }
    let out = json(&winpar(&["solve", "--file", &f, "--obj", "fixpr", "--lambda", "3", "--via", "history"]));
    assert_eq!(out["route"], "HistoryProduct");
    let out = json(&winpar(&["solve", "--file", &f, "--obj", "genreach", "--target", "v0", "--target", "v1"]));
    assert_eq!(out["winners"]["v0"], "P1");
    // P2 can stay on v1 forever.
    let out = json(&winpar(&["solve", "--file", &f, "--obj", "genreach", "--target", "v1", "--target", "v2"]));
    assert_eq!(out["winners"]["v0"], "P2");
}

#[test]
fn product_dot() {
    let f = gallery("fig5");
    let dot = scratch("fig5-product.dot");
    let out = json(&winpar(&[
        "product",
        "--file",
        &f,
        "--obj",
        "fixwp",
        "--lambda",
        "2",
        "--emit-dot",
        dot.to_str().unwrap(),
    ]));
    let text = std::fs::read_to_string(dot).unwrap();
    assert_eq!(text.matches(" -> ").count() as u64, out["edges"].as_u64().unwrap());
    assert!(text.contains("shape=box"));
}

#[test]
fn oracle_corpus_is_clean() {
    let out = json(&winpar(&["oracle", "--seeds", "0..20", "--max-v", "5", "--max-lambda", "3", "--full"]));
    assert_eq!(out["arenas"], 20);
    assert_eq!(out["total"]["violations"], serde_json::json!([]));
}

#[test]
fn exit_codes() {
    let bad = scratch("bad.game");
    std::fs::write(&bad, "winpar 1 dims=1\nvertex a 1 0 1\n").unwrap();
    let out = winpar(&["solve", "--file", bad.to_str().unwrap(), "--obj", "parity"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension mismatch at line 2"));
    let f = gallery("fig4");
    assert_eq!(winpar(&["solve", "--file", &f, "--obj", "fixpr"]).status.code(), Some(3));
    assert_eq!(winpar(&["solve", "--file", &f, "--obj", "nope"]).status.code(), Some(3));
    assert_eq!(winpar(&["solve", "--file", &f, "--obj", "parity", "--init", "zz"]).status.code(), Some(3));
    assert_eq!(winpar(&["gallery", "--name", "fig9", "--param", "n=1", "--out", &f]).status.code(), Some(3));
}
