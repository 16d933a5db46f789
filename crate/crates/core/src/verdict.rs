//! Folding allowed candidates into a herd-style verdict.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde_json::json;

use crate::anarchic::{candidate_executions, EnumConfig, EnumError, EnumStats};
use crate::cat::{self, CatModel, Env};
use crate::execution::{format_state, CandidateExecution, FinalState};
use crate::lisa::{LitmusTest, Observable, Quantifier};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub enumeration: EnumConfig,
    /// Record final states reached only through forbidden candidates.
    pub show_forbidden: bool,
    /// Keep one candidate per positive final state for graph output.
    pub keep_witnesses: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    No,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForbiddenState {
    pub state: FinalState,
    pub count: usize,
    /// Union of the failed check names over the candidates reaching it.
    pub checks: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub test: String,
    pub model: String,
    pub quantifier: Quantifier,
    pub condition: String,
    /// Distinct final states of allowed candidates with their multiplicity,
    /// sorted.
    pub states: Vec<(FinalState, usize)>,
    pub outcome: Outcome,
    /// Allowed candidates satisfying the condition body.
    pub positive: usize,
    pub negative: usize,
    pub bound: u32,
    pub enumerated: usize,
    pub allowed: usize,
    pub forbidden: usize,
    pub discarded_paths: usize,
    pub value_cycles: usize,
    pub truncated: Vec<usize>,
    pub forbidden_states: Vec<ForbiddenState>,
    pub witnesses: Vec<CandidateExecution>,
}

impl Verdict {
    /// Paths were cut at the unroll bound or ceiling.
    pub fn is_bounded(&self) -> bool {
        self.discarded_paths > 0 || !self.truncated.is_empty()
    }

    pub fn allowed_states(&self) -> impl Iterator<Item = &FinalState> {
        self.states.iter().map(|(s, _)| s)
    }

    fn kind(&self) -> &'static str {
        match self.quantifier {
            Quantifier::Exists => "Allowed",
            Quantifier::NotExists => "Forbidden",
            Quantifier::Forall => "Required",
        }
    }

    fn observation(&self) -> &'static str {
        if self.positive == 0 {
            "Never"
        } else if self.negative == 0 {
            "Always"
        } else {
            "Sometimes"
        }
    }

    /// Plain-text report modelled on herd's output.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "Test {} {}", self.test, self.kind()).unwrap();
        writeln!(s, "States {}", self.states.len()).unwrap();
        for (state, _) in &self.states {
            writeln!(s, "{}", format_state(state)).unwrap();
        }
        writeln!(
            s,
            "{}",
            match self.outcome {
                Outcome::Ok => "Ok",
                Outcome::No => "No",
            }
        )
        .unwrap();
        writeln!(s, "Witnesses").unwrap();
        writeln!(s, "Positive: {} Negative: {}", self.positive, self.negative).unwrap();
        writeln!(s, "Condition {}", self.condition).unwrap();
        writeln!(
            s,
            "Observation {} {} {} {}",
            self.test,
            self.observation(),
            self.positive,
            self.negative
        )
        .unwrap();
        writeln!(
            s,
            "Candidates {} enumerated {} allowed {} forbidden {}",
            self.test, self.enumerated, self.allowed, self.forbidden
        )
        .unwrap();
        writeln!(s, "Model {}", self.model).unwrap();
        if self.discarded_paths > 0 {
            writeln!(
                s,
                "Warning: {} paths discarded at unroll bound {} (verdict is bounded)",
                self.discarded_paths, self.bound
            )
            .unwrap();
        }
        for p in &self.truncated {
            writeln!(s, "Warning: path ceiling reached in P{p} (results are partial)").unwrap();
        }
        if self.value_cycles > 0 {
            writeln!(
                s,
                "Note: {} rf assignments rejected as self-justifying value cycles",
                self.value_cycles
            )
            .unwrap();
        }
        if !self.forbidden_states.is_empty() {
            writeln!(s, "Forbidden states {}", self.forbidden_states.len()).unwrap();
            for f in &self.forbidden_states {
                writeln!(s, "{} [{}]", format_state(&f.state), f.checks.join(", ")).unwrap();
            }
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let state = |st: &FinalState| {
            st.iter()
                .map(|(o, v)| (o.to_string(), json!(v)))
                .collect::<serde_json::Map<_, _>>()
        };
        json!({
            "test": self.test,
            "model": self.model,
            "condition": self.condition,
            "quantifier": self.quantifier,
            "outcome": match self.outcome { Outcome::Ok => "Ok", Outcome::No => "No" },
            "observation": self.observation(),
            "states": self.states.iter().map(|(st, n)| json!({
                "values": state(st),
                "count": n,
            })).collect::<Vec<_>>(),
            "positive": self.positive,
            "negative": self.negative,
            "statistics": {
                "bound": self.bound,
                "enumerated": self.enumerated,
                "allowed": self.allowed,
                "forbidden": self.forbidden,
                "discarded_paths": self.discarded_paths,
                "value_cycles": self.value_cycles,
                "truncated": self.truncated,
                "bounded": self.is_bounded(),
            },
            "forbidden_states": self.forbidden_states.iter().map(|f| json!({
                "values": state(&f.state),
                "count": f.count,
                "checks": f.checks,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Final state of a candidate restricted to the test's observables.
pub fn final_state(test: &LitmusTest, c: &CandidateExecution) -> FinalState {
    c.final_state(&test.observables())
}

/// Enumerates the anarchic candidates of `test`, keeps those `model`
/// allows, and evaluates the final condition over them.
pub fn run(test: &LitmusTest, model: &CatModel, options: &RunOptions) -> Result<Verdict, EnumError> {
    let observables: Vec<Observable> = test.observables();
    let mut states: BTreeMap<FinalState, usize> = BTreeMap::new();
    let mut forbidden: BTreeMap<FinalState, (usize, Vec<String>)> = BTreeMap::new();
    let mut witnesses: BTreeMap<FinalState, CandidateExecution> = BTreeMap::new();
    let (mut positive, mut negative, mut allowed, mut rejected) = (0, 0, 0, 0);

    let mut env: Option<Env> = None;
    let stats: EnumStats = candidate_executions(test, &options.enumeration, |c| {
        let env = match env.as_mut() {
            Some(e) => {
                e.rebind(c);
                e
            }
            None => env.insert(Env::new(c)),
        };
        let mv = cat::check_in(model, env);
        let state = c.final_state(&observables);
        if mv.allowed {
            allowed += 1;
            let holds = test
                .final_cond
                .body
                .eval(&|o| state.get(o).copied());
            if holds {
                positive += 1;
                if options.keep_witnesses && !witnesses.contains_key(&state) {
                    witnesses.insert(state.clone(), c.clone());
                }
            } else {
                negative += 1;
            }
            *states.entry(state).or_default() += 1;
        } else {
            rejected += 1;
            if options.show_forbidden {
                let entry = forbidden.entry(state).or_default();
                entry.0 += 1;
                for name in mv.failed_checks {
                    if !entry.1.contains(&name) {
                        entry.1.push(name);
                    }
                }
            }
        }
    })?;

    let outcome = match test.final_cond.quantifier {
        Quantifier::Exists => positive > 0,
        Quantifier::NotExists => positive == 0,
        Quantifier::Forall => negative == 0,
    };
    let forbidden_states = forbidden
        .into_iter()
        .filter(|(st, _)| !states.contains_key(st))
        .map(|(state, (count, checks))| ForbiddenState {
            state,
            count,
            checks,
        })
        .collect();

    Ok(Verdict {
        test: test.name.clone(),
        model: model.name.clone(),
        quantifier: test.final_cond.quantifier,
        condition: test.final_cond.to_string(),
        states: states.into_iter().collect(),
        outcome: if outcome { Outcome::Ok } else { Outcome::No },
        positive,
        negative,
        bound: options.enumeration.unroll.bound,
        enumerated: stats.candidates,
        allowed,
        forbidden: rejected,
        discarded_paths: stats.discarded_paths,
        value_cycles: stats.value_cycles,
        truncated: stats.truncated,
        forbidden_states,
        witnesses: witnesses.into_values().collect(),
    })
}
