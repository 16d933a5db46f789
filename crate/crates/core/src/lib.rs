//! Axiomatic simulation of LISA litmus tests.
//!
//! A test is executed under an anarchic semantics where every read may
//! observe any write to its location. Each execution is abstracted to a
//! [`CandidateExecution`](execution::CandidateExecution) (events with
//! `po`, `rf`, `co`), and a cat model decides which candidates are allowed.
//! The [`verdict`] module folds the allowed candidates into final states.

pub mod anarchic;
pub mod cat;
pub mod cli;
pub mod dot;
pub mod execution;
pub mod lisa;
pub mod paths;
pub mod relation;
pub mod verdict;

pub use anarchic::{candidate_executions, EnumConfig};
pub use cat::{parse_cat, CatModel};
pub use execution::{CandidateExecution, Event, EventKind, FinalState};
pub use lisa::{load_litmus, parse_litmus, LitmusTest};
pub use relation::{EventSet, Relation};
pub use verdict::{run, Verdict};
