//! Events and candidate executions.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::lisa::Observable;
use crate::relation::Relation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EventKind {
    /// Initial write of a location.
    IW,
    W,
    R,
    F,
    B,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::IW => "IW",
            EventKind::W => "W",
            EventKind::R => "R",
            EventKind::F => "F",
            EventKind::B => "B",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Event {
    pub id: usize,
    /// `None` for initial writes.
    pub proc: Option<usize>,
    pub po_index: usize,
    pub kind: EventKind,
    pub location: Option<String>,
    /// Ground value: written/read value, or the branch condition for `B`.
    /// Fences carry none.
    pub value: Option<i64>,
    pub annotations: Vec<String>,
}

impl Event {
    pub fn is_write(&self) -> bool {
        matches!(self.kind, EventKind::W | EventKind::IW)
    }

    pub fn is_memory(&self) -> bool {
        matches!(self.kind, EventKind::W | EventKind::IW | EventKind::R)
    }
}

impl fmt::Display for Event {
    /// `proc:idx kind loc=val`, with `init` for initial writes.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.proc {
            Some(p) => write!(f, "{p}:{} {}", self.po_index, self.kind)?,
            None => write!(f, "init {}", self.kind)?,
        }
        match (&self.location, self.value) {
            (Some(l), Some(v)) => write!(f, " {l}={v}"),
            (None, Some(v)) => write!(f, " {v}"),
            _ => Ok(()),
        }
    }
}

/// An anarchic execution abstracted to events and communication relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateExecution {
    pub events: Vec<Event>,
    pub po: Relation,
    pub rf: Relation,
    pub co: Relation,
    /// Index of the control path chosen for each process.
    pub chosen_paths: Vec<usize>,
    pub final_regs: Registers,
}

/// Final register contents, keyed by process and register name.
pub type Registers = BTreeMap<(usize, String), i64>;

/// Observable values at the end of an execution, ordered registers first.
pub type FinalState = BTreeMap<Observable, i64>;

impl CandidateExecution {
    /// `rf⁻¹ ; co`
    pub fn fr(&self) -> Relation {
        self.rf.inverse().compose(&self.co)
    }

    /// Value of each location after the execution: its co-maximal write.
    pub fn final_memory(&self) -> BTreeMap<String, i64> {
        let mut out = BTreeMap::new();
        for e in &self.events {
            if e.is_write() && self.co.image(e.id).next().is_none() {
                if let (Some(l), Some(v)) = (&e.location, e.value) {
                    out.insert(l.clone(), v);
                }
            }
        }
        out
    }

    /// Projects the execution onto `observables`. Registers come from the
    /// chosen path's terminal valuation; registers never assigned read as 0.
    pub fn final_state(&self, observables: &[Observable]) -> FinalState {
        let memory = self.final_memory();
        observables
            .iter()
            .map(|o| {
                let v = match o {
                    Observable::Reg { proc, reg } => self
                        .final_regs
                        .get(&(*proc, reg.clone()))
                        .copied()
                        .unwrap_or(0),
                    Observable::Loc { loc } => memory.get(loc).copied().unwrap_or(0),
                };
                (o.clone(), v)
            })
            .collect()
    }
}

pub fn format_state(state: &FinalState) -> String {
    let mut s = String::new();
    for (o, v) in state {
        s.push_str(&format!("{o}={v}; "));
    }
    s.pop();
    s
}
