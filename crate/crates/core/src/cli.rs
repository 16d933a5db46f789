//! Command-line front end.
//!
//! ```text
//! litmusforge -model sc.cat [-unroll N] [-ceiling N] [-partial] [-json]
//!             [-dot DIR] [-show-forbidden] [-candidates FILE] FILE...
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;

use crate::anarchic::{candidate_executions, candidate_json, EnumConfig, EnumError};
use crate::cat::{parse_cat_with_tags, CatModel};
use crate::dot::to_dot;
use crate::lisa::{load_litmus, LisaError, LitmusTest};
use crate::paths::{UnrollConfig, UnrollError, DEFAULT_BOUND, DEFAULT_CEILING};
use crate::verdict::{run, RunOptions};

pub const MODELDIR_VAR: &str = "LITMUSFORGE_MODELDIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Parser)]
#[command(
    name = "litmusforge",
    about = "Simulate LISA litmus tests under a cat consistency model"
)]
pub struct RunConfig {
    /// cat model file; looked up in $LITMUSFORGE_MODELDIR if not found
    #[arg(long)]
    pub model: PathBuf,
    /// times each backward branch may be taken per path
    #[arg(long, default_value_t = DEFAULT_BOUND, value_parser = clap::value_parser!(u32).range(1..))]
    pub unroll: u32,
    /// maximum number of paths per process
    #[arg(long, default_value_t = DEFAULT_CEILING)]
    pub ceiling: usize,
    /// keep going with partial results when the ceiling is reached
    #[arg(long)]
    pub partial: bool,
    /// emit one JSON object per test instead of text
    #[arg(long)]
    pub json: bool,
    /// write a DOT graph per positive witness into this directory
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// also list final states reached only by forbidden candidates
    #[arg(long)]
    pub show_forbidden: bool,
    /// dump every enumerated candidate as JSON lines into this file
    #[arg(long)]
    pub candidates: Option<PathBuf>,
    /// litmus test files
    #[arg(required = true)]
    pub litmus: Vec<PathBuf>,
}

/// Accepts herd-style single-dash long options by rewriting `-model` into
/// `--model`.
fn normalise(args: impl IntoIterator<Item = String>) -> Vec<String> {
    args.into_iter()
        .enumerate()
        .map(|(i, a)| {
            let single_long = i > 0
                && a.len() > 2
                && a.starts_with('-')
                && !a.starts_with("--")
                && a[1..].starts_with(|c: char| c.is_ascii_alphabetic());
            if single_long {
                format!("-{a}")
            } else {
                a
            }
        })
        .collect()
}

fn resolve_model(path: &Path) -> PathBuf {
    if path.exists() {
        return path.to_path_buf();
    }
    if let Some(dir) = std::env::var_os(MODELDIR_VAR) {
        let candidate = Path::new(&dir).join(path);
        if candidate.exists() {
            return candidate;
        }
    }
    path.to_path_buf()
}

fn load_test(path: &Path) -> Result<LitmusTest, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    load_litmus(&text).map_err(|e| match e {
        LisaError::Parse(p) => format!("{}:{}:{}: {}", path.display(), p.line, p.col, p.message),
        LisaError::Invalid(v) => format!("{}: {v}", path.display()),
    })
}

fn load_model(path: &Path, tags: &BTreeSet<&str>) -> Result<CatModel, String> {
    let path = resolve_model(path);
    let text =
        fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut model =
        parse_cat_with_tags(&text, tags).map_err(|e| format!("{}:{e}", path.display()))?;
    if model.name.is_empty() {
        if let Some(stem) = path.file_stem() {
            model.name = stem.to_string_lossy().into_owned();
        }
    }
    Ok(model)
}

fn sanitise(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "+-_.".contains(c) { c } else { '_' })
        .collect()
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code.
pub fn main_with(
    args: impl IntoIterator<Item = String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let config = match RunConfig::try_parse_from(normalise(args)) {
        Ok(c) => c,
        Err(e) => {
            let help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            if help {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let _ = write!(err, "{e}");
            return EXIT_USAGE;
        }
    };
    match execute(&config, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Budget(msg)) => {
            let _ = writeln!(err, "error: {msg} (rerun with -partial for partial results)");
            EXIT_BUDGET
        }
    }
}

enum Failure {
    Usage(String),
    Budget(String),
}

fn execute(config: &RunConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let tests = config
        .litmus
        .iter()
        .map(|p| load_test(p))
        .collect::<Result<Vec<_>, _>>()
        .map_err(Failure::Usage)?;
    let tags: BTreeSet<&str> = tests.iter().flat_map(|t| t.tags()).collect();
    let model = load_model(&config.model, &tags).map_err(Failure::Usage)?;

    let options = RunOptions {
        enumeration: EnumConfig {
            unroll: UnrollConfig {
                bound: config.unroll,
                ceiling: config.ceiling,
                partial: config.partial,
            },
        },
        show_forbidden: config.show_forbidden,
        keep_witnesses: config.dot.is_some(),
    };
    let io = |e: std::io::Error| Failure::Usage(e.to_string());
    let mut dump = match &config.candidates {
        Some(p) => Some(fs::File::create(p).map_err(io)?),
        None => None,
    };
    if let Some(dir) = &config.dot {
        fs::create_dir_all(dir).map_err(io)?;
    }

    for test in &tests {
        let verdict = run(test, &model, &options).map_err(enum_failure)?;
        if config.json {
            writeln!(out, "{}", verdict.to_json()).map_err(io)?;
        } else {
            write!(out, "{}", verdict.render_text()).map_err(io)?;
        }
        if let Some(dir) = &config.dot {
            for (i, w) in verdict.witnesses.iter().enumerate() {
                let file = dir.join(format!("{}-{i}.dot", sanitise(&test.name)));
                fs::write(file, to_dot(&test.name, w)).map_err(io)?;
            }
        }
        if let Some(f) = dump.as_mut() {
            let mut result = Ok(());
            candidate_executions(test, &options.enumeration, |c| {
                if result.is_ok() {
                    let mut line = candidate_json(c);
                    line["test"] = test.name.clone().into();
                    result = writeln!(f, "{line}");
                }
            })
            .map_err(enum_failure)?;
            result.map_err(io)?;
        }
    }
    Ok(())
}

fn enum_failure(e: EnumError) -> Failure {
    match e {
        EnumError::Unroll(UnrollError::BudgetExceeded { .. }) => Failure::Budget(e.to_string()),
        _ => Failure::Usage(e.to_string()),
    }
}
