mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::*;

fn litmusforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_litmusforge"))
        .args(args)
        .env_remove("LITMUSFORGE_MODELDIR")
        .output()
        .unwrap()
}

fn path(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn golden_outputs() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for name in CORPUS {
        for m in ["sc", "tso"] {
            let o = litmusforge(&["-model", &path(&model_path(m)), &path(&litmus_path(name))]);
            assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
            let expected = std::fs::read_to_string(golden.join(format!("{name}.{m}.txt"))).unwrap();
            assert_eq!(stdout(&o), expected, "{name} under {m}");
        }
    }
}

#[test]
fn sb_happy_path() {
    let o = litmusforge(&["-model", &path(&model_path("sc")), &path(&litmus_path("SB"))]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("Test SB Allowed\nStates 3\n"));
    assert!(out.contains("\nNo\n"));
    assert!(stderr(&o).is_empty());
}

#[test]
fn missing_model_prints_usage() {
    let o = litmusforge(&[&path(&litmus_path("SB"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn bounded_verdict_warns() {
    let o = litmusforge(&[
        "-model",
        &path(&model_path("sc")),
        "-unroll",
        "1",
        &path(&litmus_path("Peterson")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let expected = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/Peterson.sc.unroll1.txt"),
    )
    .unwrap();
    assert_eq!(stdout(&o), expected);
    assert!(stdout(&o).contains("Warning: 2 paths discarded at unroll bound 1"));
}

#[test]
fn parse_errors_name_the_file_and_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.litmus");
    std::fs::write(&bad, "LISA bad\n{}\nP0 ;\n w[] x 1 ;\n zz ;\nexists (x=1)\n").unwrap();
    let o = litmusforge(&["-model", &path(&model_path("sc")), &path(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(&format!("{}:5:2:", bad.display())), "{}", stderr(&o));

    let unnamed = dir.path().join("unnamed.cat");
    std::fs::write(&unnamed, "acyclic po | rf | co | fr").unwrap();
    let o = litmusforge(&["-model", &path(&unnamed), &path(&litmus_path("SB"))]);
    assert!(stdout(&o).contains("\nModel unnamed\n"));

    let cat = dir.path().join("bad.cat");
    std::fs::write(&cat, "acyclic po | nope").unwrap();
    let o = litmusforge(&["-model", &path(&cat), &path(&litmus_path("SB"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(&format!("{}:1:14:", cat.display())), "{}", stderr(&o));
}

#[test]
fn budget_exceeded_unless_partial() {
    let m = path(&model_path("sc"));
    let p = path(&litmus_path("Peterson"));
    let o = litmusforge(&["-model", &m, "-ceiling", "2", &p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("budget"));
    let o = litmusforge(&["-model", &m, "-ceiling", "2", "-partial", &p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("path ceiling reached in P0"));
}

#[test]
fn model_directory_fallback() {
    let o = Command::new(env!("CARGO_BIN_EXE_litmusforge"))
        .args(["-model", "tso.cat", &path(&litmus_path("SB"))])
        .env("LITMUSFORGE_MODELDIR", root().join("models"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("Model TSO"));
}

#[test]
fn several_files_give_one_block_each() {
    let o = litmusforge(&[
        "-model",
        &path(&model_path("sc")),
        &path(&litmus_path("SB")),
        &path(&litmus_path("MP")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.matches("\nModel SC\n").count(), 2);
    assert!(out.find("Test SB").unwrap() < out.find("Test MP").unwrap());
}

#[test]
fn json_output() {
    let o = litmusforge(&["-json", "-model", &path(&model_path("tso")), &path(&litmus_path("SB"))]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["test"], "SB");
    assert_eq!(v["outcome"], "Ok");
    assert_eq!(v["states"].as_array().unwrap().len(), 4);
    assert_eq!(v["statistics"]["enumerated"], 4);
}

#[test]
fn dot_and_candidate_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let dots = dir.path().join("dots");
    let dump = dir.path().join("candidates.jsonl");
    let o = litmusforge(&[
        "-model",
        &path(&model_path("anarchic")),
        "-dot",
        &path(&dots),
        "-candidates",
        &path(&dump),
        &path(&litmus_path("SB")),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let graphs: Vec<_> = std::fs::read_dir(&dots).unwrap().collect();
    assert_eq!(graphs.len(), 1);
    let g = std::fs::read_to_string(graphs[0].as_ref().unwrap().path()).unwrap();
    assert!(g.starts_with("digraph \"SB\""));
    let lines = std::fs::read_to_string(&dump).unwrap();
    assert_eq!(lines.lines().count(), 4);
    for l in lines.lines() {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        assert_eq!(v["test"], "SB");
    }
}

#[test]
fn show_forbidden_lists_excluded_states() {
    let o = litmusforge(&[
        "-show-forbidden",
        "-model",
        &path(&model_path("sc")),
        &path(&litmus_path("SB")),
    ]);
    assert!(stdout(&o).ends_with("Forbidden states 1\n0:r1=0; 1:r1=0; x=1; y=1; [sc]\n"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let mut args = vec!["-model".to_string(), path(&model_path("anarchic"))];
    args.extend(CORPUS.iter().map(|n| path(&litmus_path(n))));
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    assert_eq!(litmusforge(&args).stdout, litmusforge(&args).stdout);
}
