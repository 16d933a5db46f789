#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use litmusforge::verdict::{run, RunOptions};
use litmusforge::{load_litmus, parse_cat, CatModel, FinalState, LitmusTest, Verdict};

/// Every test shipped in `litmus/`.
pub const CORPUS: &[&str] = &[
    "SB", "SB+mfences", "MP", "LB", "LB+datas", "2+2W", "R", "CoRR", "CoWW", "Peterson",
];

pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn litmus_path(name: &str) -> PathBuf {
    root().join("litmus").join(format!("{name}.litmus"))
}

pub fn model_path(name: &str) -> PathBuf {
    root().join("models").join(format!("{name}.cat"))
}

pub fn source(name: &str) -> String {
    std::fs::read_to_string(litmus_path(name)).unwrap()
}

pub fn test(name: &str) -> LitmusTest {
    load_litmus(&source(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn model(name: &str) -> CatModel {
    parse_cat(&std::fs::read_to_string(model_path(name)).unwrap()).unwrap()
}

pub fn verdict(t: &LitmusTest, m: &CatModel, bound: u32) -> Verdict {
    let mut options = RunOptions::default();
    options.enumeration.unroll.bound = bound;
    run(t, m, &options).unwrap()
}

pub fn allowed_states(t: &LitmusTest, m: &CatModel, bound: u32) -> BTreeSet<FinalState> {
    verdict(t, m, bound).allowed_states().cloned().collect()
}
