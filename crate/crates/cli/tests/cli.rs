use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

fn dir(sub: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join(sub)
}

fn data(name: &str) -> String {
    dir("data").join(name).to_string_lossy().into_owned()
}

fn hog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hog")).args(args).output().expect("spawn hog")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn figures_match_golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for fig in ["7", "8", "9", "11", "12", "t1t2"] {
        let start = Instant::now();
        let out = hog(&["repro", "--figure", fig, "--format", "json"]);
        assert!(start.elapsed() < Duration::from_secs(10), "figure {fig} took {:?}", start.elapsed());
        assert_eq!(out.status.code(), Some(0), "figure {fig}");
        let path = dir("golden").join(format!("fig{fig}.json"));
        if update {
            std::fs::write(&path, &out.stdout).unwrap();
            continue;
        }
        let want: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(json(&out), want, "figure {fig} differs from {}", path.display());
    }
}

#[test]
fn unknown_figure_is_an_input_error() {
    assert_eq!(hog(&["repro", "--figure", "99"]).status.code(), Some(2));
}

#[test]
fn parse_type_reports_arena() {
    let out = hog(&["parse-type", "((o -> o) -> o) -> o", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["arena"]["parent"].as_array().unwrap().len(), 4);
    assert_eq!(hog(&["parse-type", "(o -> "]).status.code(), Some(2));
}

#[test]
fn pview_and_deseq_of_a_play() {
    let p = data("play.json");
    let out = hog(&["pview", &p]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("[0, 1, 2, 1]"));
    let out = hog(&["deseq", &p]);
    assert_eq!(stdout(&out).trim(), "(0 (1 (2 (3)) (2)) (1 (2)) (1))");
}

#[test]
fn kierstead_terms_are_separated() {
    let (x, y) = (data("kx.json"), data("ky.json"));
    let out = hog(&["equal", &x, &y, "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["equal"], false);
    assert_eq!(v["separating"]["size"], 30);
    assert_eq!(hog(&["equal", &x, &x]).status.code(), Some(0));
    assert_eq!(hog(&["bisim", &x, &y]).status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let (x, bad) = (data("kx.json"), data("bad.json"));
    assert_eq!(hog(&["equal", &x, &bad]).status.code(), Some(2));
    assert_eq!(hog(&["equal", &x, "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(hog(&["equal", &x, &data("ky.json"), "--max-events", "5"]).status.code(), Some(3));
    assert_eq!(hog(&["pview", &x, "--format", "dot"]).status.code(), Some(2));
}

#[test]
fn explanations_are_counted() {
    let out = hog(&["explain", &data("two_explanations.json"), "--format", "json"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["explanations"].as_array().unwrap().len(), 2);
}

#[test]
fn counterexamples() {
    let out = hog(&["counterexample", "positional", &data("branching.json")]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("(0 (1 (2)) (1 (3)))"));
    let out = hog(&["counterexample", "trees", "4", "--format", "json"]);
    assert_eq!(json(&out)["size"], 65);
    let out = hog(&["counterexample", "pviews", &data("branching.json"), &data("branching_short.json"), "--format", "json"]);
    assert_eq!(json(&out)["transfer"], true);
}

#[test]
fn interp_accepts_a_term() {
    let out = hog(&["interp", "\\f:o -> o. \\x:o. f (f x)", "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn causal_strategy_renders_as_dot() {
    let out = hog(&["caus", &data("kx.json"), "--format", "dot"]);
    assert!(stdout(&out).starts_with("digraph"));
}
