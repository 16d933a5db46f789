//! Candidate executions under the anarchic semantics.
//!
//! Every read may take its value from any write to the same location,
//! including po-later writes of its own process, and writes to a location
//! may be coherence-ordered in any way after the initial write. The only
//! filter applied here is value consistency: the values induced by `rf`
//! must satisfy the branch constraints of the chosen control paths.
//!
//! Read values are computed as the least fixpoint of "a read returns the
//! value of its source write" under strict evaluation. An `rf` assignment
//! whose values depend on themselves through a cycle (an out-of-thin-air
//! justification) has no such fixpoint and is rejected; the rejections are
//! counted in [`EnumStats::value_cycles`].

use std::collections::BTreeMap;

use itertools::Itertools;
use serde_json::json;
use thiserror::Error;

use crate::execution::{CandidateExecution, Event, EventKind, Registers};
use crate::lisa::LitmusTest;
use crate::paths::{program_order, unroll, Overflow, ProcessPath, PythiaVar, SymExpr, UnrollConfig, UnrollError};
use crate::relation::Relation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error(transparent)]
    Unroll(#[from] UnrollError),
    #[error("arithmetic overflow while solving read values")]
    Overflow,
}

impl From<Overflow> for EnumError {
    fn from(_: Overflow) -> Self {
        EnumError::Overflow
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnumConfig {
    pub unroll: UnrollConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EnumStats {
    pub path_combinations: usize,
    pub candidates: usize,
    /// Paths abandoned at the unroll bound, summed over processes.
    pub discarded_paths: usize,
    /// Complete rf assignments rejected because some read value was only
    /// self-justified.
    pub value_cycles: usize,
    /// Processes whose path enumeration stopped at the ceiling.
    pub truncated: Vec<usize>,
}

/// Why an rf assignment does not yield a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reject {
    /// Some read value has no well-founded justification.
    ValueCycle,
    /// A branch constraint evaluates the wrong way.
    Constraint,
}

/// Events of one combination of control paths (one per process), with
/// symbolic values still attached.
#[derive(Debug, Clone)]
pub struct PathCombination<'a> {
    pub path_ids: Vec<usize>,
    pub paths: Vec<&'a ProcessPath>,
    /// Events with ground values for initial writes only.
    pub events: Vec<Event>,
    /// Id of the first event of each process.
    pub offsets: Vec<usize>,
    pub po: Relation,
    /// Value expression of every write, initial writes included.
    write_values: Vec<Option<SymExpr>>,
}

impl<'a> PathCombination<'a> {
    pub fn new(test: &LitmusTest, path_ids: Vec<usize>, paths: Vec<&'a ProcessPath>) -> Self {
        let mut events = Vec::new();
        let mut write_values = Vec::new();
        for loc in test.locations() {
            let v = test.initial_value(loc);
            events.push(Event {
                id: events.len(),
                proc: None,
                po_index: 0,
                kind: EventKind::IW,
                location: Some(loc.to_string()),
                value: Some(v),
                annotations: Vec::new(),
            });
            write_values.push(Some(SymExpr::Const(v)));
        }
        let mut offsets = Vec::new();
        for path in &paths {
            offsets.push(events.len());
            for (i, pe) in path.events.iter().enumerate() {
                events.push(Event {
                    id: events.len(),
                    proc: Some(path.proc),
                    po_index: i,
                    kind: pe.kind,
                    location: pe.location.clone(),
                    value: None,
                    annotations: pe.annotations.clone(),
                });
                write_values.push(match pe.kind {
                    EventKind::W => pe.value.clone(),
                    _ => None,
                });
            }
        }
        let po = program_order(&paths, &offsets, events.len());
        PathCombination {
            path_ids,
            paths,
            events,
            offsets,
            po,
            write_values,
        }
    }

    fn event_of(&self, var: PythiaVar) -> usize {
        self.offsets[var.proc] + var.po_index
    }

    pub fn reads(&self) -> Vec<usize> {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::R)
            .map(|e| e.id)
            .collect()
    }

    fn eval(&self, e: &SymExpr, vals: &[Option<i64>]) -> Result<Option<i64>, Overflow> {
        e.eval(&|v| vals[self.event_of(v)])
    }

    /// All branch constraints whose value is known agree with it.
    fn constraints_consistent(&self, vals: &[Option<i64>]) -> Result<bool, Overflow> {
        for path in &self.paths {
            for c in &path.constraints {
                if let Some(v) = self.eval(&c.expr, vals)? {
                    if !c.holds(v) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Grounds every event value and the final registers from complete read
    /// values.
    fn ground(&self, vals: &[Option<i64>]) -> Result<(Vec<Event>, Registers), Overflow> {
        let mut events = self.events.clone();
        for (path, &base) in self.paths.iter().zip(&self.offsets) {
            for (i, pe) in path.events.iter().enumerate() {
                let e = &mut events[base + i];
                e.value = match (&pe.kind, &pe.value) {
                    (EventKind::R, _) => vals[base + i],
                    (_, Some(x)) => self.eval(x, vals)?,
                    (_, None) => None,
                };
            }
        }
        let mut regs = BTreeMap::new();
        for path in &self.paths {
            for (r, x) in &path.final_regs {
                let v = self.eval(x, vals)?.expect("all reads are resolved");
                regs.insert((path.proc, r.clone()), v);
            }
        }
        Ok((events, regs))
    }

    fn initial_values(&self) -> Vec<Option<i64>> {
        self.events
            .iter()
            .map(|e| if e.kind == EventKind::IW { e.value } else { None })
            .collect()
    }
}

/// Every total map from reads to same-location writes, as `(w, r)` pairs.
/// Reads are taken in id order and sources vary fastest on the last read.
pub fn enumerate_rf(events: &[Event]) -> Vec<Vec<(usize, usize)>> {
    let reads: Vec<&Event> = events.iter().filter(|e| e.kind == EventKind::R).collect();
    if reads.is_empty() {
        return vec![Vec::new()];
    }
    reads
        .iter()
        .map(|r| {
            events
                .iter()
                .filter(|w| w.is_write() && w.location == r.location)
                .map(|w| (w.id, r.id))
                .collect::<Vec<_>>()
        })
        .multi_cartesian_product()
        .collect()
}

/// Solves read values for a complete rf assignment by iterating evaluation
/// for at most `|reads|` rounds, then checks the branch constraints.
/// On success returns the events with ground values and the final registers.
pub fn solve_values(
    combo: &PathCombination<'_>,
    rf: &[(usize, usize)],
) -> Result<Result<(Vec<Event>, Registers), Reject>, Overflow> {
    let mut vals = combo.initial_values();
    let rounds = rf.len();
    for _ in 0..=rounds {
        let mut changed = false;
        for &(w, r) in rf {
            if vals[r].is_none() {
                let src = combo.write_values[w].as_ref().expect("rf source is a write");
                if let Some(v) = combo.eval(src, &vals)? {
                    vals[r] = Some(v);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    if rf.iter().any(|&(_, r)| vals[r].is_none()) {
        return Ok(Err(Reject::ValueCycle));
    }
    for path in &combo.paths {
        for c in &path.constraints {
            let v = combo.eval(&c.expr, &vals)?.expect("constraints only mention reads");
            if !c.holds(v) {
                return Ok(Err(Reject::Constraint));
            }
        }
    }
    Ok(Ok(combo.ground(&vals)?))
}

/// Every coherence order: per location, the initial write first and then
/// any permutation of the other writes. Locations vary in id order of their
/// initial writes, the last one fastest.
pub fn enumerate_co(events: &[Event]) -> Vec<Relation> {
    let n = events.len();
    let per_location: Vec<Vec<Vec<usize>>> = events
        .iter()
        .filter(|e| e.kind == EventKind::IW)
        .map(|iw| {
            let writes: Vec<usize> = events
                .iter()
                .filter(|w| w.kind == EventKind::W && w.location == iw.location)
                .map(|w| w.id)
                .collect();
            let k = writes.len();
            writes
                .into_iter()
                .permutations(k)
                .map(|perm| std::iter::once(iw.id).chain(perm).collect())
                .collect()
        })
        .collect();
    if per_location.is_empty() {
        return vec![Relation::empty(n)];
    }
    per_location
        .into_iter()
        .multi_cartesian_product()
        .map(|orders| {
            let mut co = Relation::empty(n);
            for order in orders {
                for (i, &a) in order.iter().enumerate() {
                    for &b in &order[i + 1..] {
                        co.insert(a, b);
                    }
                }
            }
            co
        })
        .collect()
}

/// Feeds every candidate execution of `test` to `visit`, in a fixed order:
/// path combinations (last process fastest), then rf assignments (sources
/// in id order, last read fastest), then coherence orders.
pub fn candidate_executions(
    test: &LitmusTest,
    config: &EnumConfig,
    mut visit: impl FnMut(&CandidateExecution),
) -> Result<EnumStats, EnumError> {
    let mut stats = EnumStats::default();
    let mut per_proc = Vec::new();
    for p in &test.processes {
        let u = unroll(p, &config.unroll)?;
        stats.discarded_paths += u.discarded;
        if u.truncated {
            stats.truncated.push(p.id);
        }
        per_proc.push(u.paths);
    }

    let combos = per_proc
        .iter()
        .map(|paths| 0..paths.len())
        .multi_cartesian_product();
    for ids in combos {
        stats.path_combinations += 1;
        let paths = ids.iter().zip(&per_proc).map(|(&i, ps)| &ps[i]).collect();
        let combo = PathCombination::new(test, ids, paths);
        let mut search = RfSearch::new(&combo);
        search.run(0, &mut stats, &mut visit)?;
    }
    Ok(stats)
}

/// Depth-first rf enumeration that propagates read values as sources are
/// chosen and prunes as soon as a decided constraint fails.
struct RfSearch<'c, 'a> {
    combo: &'c PathCombination<'a>,
    reads: Vec<usize>,
    sources: Vec<Vec<usize>>,
    chosen: Vec<usize>,
    vals: Vec<Option<i64>>,
    cos: Vec<Relation>,
}

impl<'c, 'a> RfSearch<'c, 'a> {
    fn new(combo: &'c PathCombination<'a>) -> Self {
        let reads = combo.reads();
        let sources = reads
            .iter()
            .map(|&r| {
                let loc = &combo.events[r].location;
                combo
                    .events
                    .iter()
                    .filter(|w| w.is_write() && &w.location == loc)
                    .map(|w| w.id)
                    .collect()
            })
            .collect();
        RfSearch {
            combo,
            chosen: vec![0; reads.len()],
            reads,
            sources,
            vals: combo.initial_values(),
            cos: enumerate_co(&combo.events),
        }
    }

    /// Assigns values to reads whose chosen source has become evaluable.
    fn propagate(&mut self, assigned: usize) -> Result<(), Overflow> {
        loop {
            let mut changed = false;
            for i in 0..assigned {
                let r = self.reads[i];
                if self.vals[r].is_none() {
                    let src = self.combo.write_values[self.chosen[i]]
                        .as_ref()
                        .expect("rf source is a write");
                    if let Some(v) = self.combo.eval(src, &self.vals)? {
                        self.vals[r] = Some(v);
                        changed = true;
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    fn run(
        &mut self,
        k: usize,
        stats: &mut EnumStats,
        visit: &mut impl FnMut(&CandidateExecution),
    ) -> Result<(), EnumError> {
        if k == self.reads.len() {
            if self.reads.iter().any(|&r| self.vals[r].is_none()) {
                stats.value_cycles += 1;
                return Ok(());
            }
            self.emit(stats, visit)?;
            return Ok(());
        }
        for s in 0..self.sources[k].len() {
            self.chosen[k] = self.sources[k][s];
            let saved = self.vals.clone();
            self.propagate(k + 1)?;
            if self.combo.constraints_consistent(&self.vals)? {
                self.run(k + 1, stats, visit)?;
            }
            self.vals = saved;
        }
        Ok(())
    }

    fn emit(
        &self,
        stats: &mut EnumStats,
        visit: &mut impl FnMut(&CandidateExecution),
    ) -> Result<(), EnumError> {
        let combo = self.combo;
        let n = combo.events.len();
        let (events, final_regs) = combo.ground(&self.vals)?;
        let rf = Relation::from_pairs(n, self.chosen.iter().copied().zip(self.reads.iter().copied()));
        let mut cand = CandidateExecution {
            events,
            po: combo.po.clone(),
            rf,
            co: Relation::empty(n),
            chosen_paths: combo.path_ids.clone(),
            final_regs,
        };
        for co in &self.cos {
            cand.co = co.clone();
            stats.candidates += 1;
            visit(&cand);
        }
        Ok(())
    }
}

/// One line of the candidate dump: events plus rf/co/po as pair lists.
pub fn candidate_json(c: &CandidateExecution) -> serde_json::Value {
    let pairs = |r: &Relation| r.pairs().map(|(a, b)| [a, b]).collect::<Vec<_>>();
    json!({
        "paths": c.chosen_paths,
        "events": c.events.iter().map(|e| json!({
            "id": e.id,
            "proc": e.proc,
            "po_index": e.po_index,
            "kind": e.kind,
            "loc": e.location,
            "value": e.value,
            "annotations": e.annotations,
        })).collect::<Vec<_>>(),
        "po": pairs(&c.po),
        "rf": pairs(&c.rf),
        "co": pairs(&c.co),
    })
}
