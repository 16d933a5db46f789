//! Brute-force anarchic candidates: guess every read value from a closed
//! domain, run each thread concretely, then try every value-matching rf and
//! every coherence order, rejecting rf choices whose data dependencies form
//! a cycle (values out of thin air).

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use litmusforge::lisa::{Expr, Instruction, LitmusTest, Process};
use litmusforge::CandidateExecution;

use super::{eval, target, Regs};

#[derive(Debug, Clone)]
struct Ev {
    kind: &'static str,
    loc: Option<String>,
    value: Option<i64>,
    /// Po indices of the reads this write's value depends on.
    deps: BTreeSet<usize>,
}

#[derive(Debug, Clone)]
struct Trace {
    events: Vec<Ev>,
    regs: Regs,
}

#[derive(Clone)]
struct Run {
    pc: usize,
    regs: Regs,
    taint: BTreeMap<String, BTreeSet<usize>>,
    back: BTreeMap<usize, u32>,
    events: Vec<Ev>,
}

fn taint_of(e: &Expr, run: &Run) -> BTreeSet<usize> {
    let mut regs = BTreeSet::new();
    e.registers(&mut regs);
    regs.iter()
        .flat_map(|r| run.taint.get(*r).cloned().unwrap_or_default())
        .collect()
}

fn traces(p: &Process, domain: &BTreeSet<i64>, bound: u32) -> Vec<Trace> {
    let mut out = Vec::new();
    let mut stack = vec![Run {
        pc: 0,
        regs: Regs::new(),
        taint: BTreeMap::new(),
        back: BTreeMap::new(),
        events: Vec::new(),
    }];
    'runs: while let Some(mut r) = stack.pop() {
        while let Some(i) = p.code.get(r.pc) {
            let mut next = r.pc + 1;
            match i {
                Instruction::Label(_) => {}
                Instruction::Mov { register, value } => {
                    let t = taint_of(value, &r);
                    r.regs.insert(register.clone(), eval(value, &r.regs));
                    r.taint.insert(register.clone(), t);
                }
                Instruction::Write { location, value, .. } => r.events.push(Ev {
                    kind: "W",
                    loc: Some(location.clone()),
                    value: Some(eval(value, &r.regs)),
                    deps: taint_of(value, &r),
                }),
                Instruction::Fence { .. } => r.events.push(Ev {
                    kind: "F",
                    loc: None,
                    value: None,
                    deps: BTreeSet::new(),
                }),
                Instruction::Read { register, location, .. } => {
                    let idx = r.events.len();
                    r.events.push(Ev {
                        kind: "R",
                        loc: Some(location.clone()),
                        value: None,
                        deps: BTreeSet::new(),
                    });
                    r.taint.insert(register.clone(), BTreeSet::from([idx]));
                    r.pc = next;
                    for v in domain {
                        let mut g = r.clone();
                        g.events[idx].value = Some(*v);
                        g.regs.insert(register.clone(), *v);
                        stack.push(g);
                    }
                    continue 'runs;
                }
                Instruction::Branch { register, label, .. } => {
                    let v = r.regs.get(register).copied().unwrap_or(0);
                    r.events.push(Ev {
                        kind: "B",
                        loc: None,
                        value: Some(v),
                        deps: BTreeSet::new(),
                    });
                    if v != 0 {
                        next = target(p, label);
                    }
                }
                Instruction::Jump { label } => next = target(p, label),
            }
            if next <= r.pc {
                let n = r.back.entry(r.pc).or_insert(0);
                if *n == bound {
                    continue 'runs;
                }
                *n += 1;
            }
            r.pc = next;
        }
        let mut regs = r.regs;
        for reg in p.registers() {
            regs.entry(reg.to_string()).or_insert(0);
        }
        out.push(Trace { events: r.events, regs });
    }
    out
}

fn literals(e: &Expr, out: &mut BTreeSet<i64>) {
    match e {
        Expr::Const(c) => {
            out.insert(*c);
        }
        Expr::Reg(_) => {}
        Expr::Unop(_, a) => literals(a, out),
        Expr::Binop(_, a, b) => {
            literals(a, out);
            literals(b, out);
        }
    }
}

/// Upper bound on the reads of one candidate, which bounds the depth of
/// any acyclic chain of data dependencies.
fn max_reads(test: &LitmusTest, bound: u32) -> usize {
    test.processes
        .iter()
        .map(|p| {
            let reads = p.code.iter().filter(|i| matches!(i, Instruction::Read { .. })).count();
            let looping = p.code.iter().enumerate().any(|(pc, i)| match i {
                Instruction::Branch { label, .. } | Instruction::Jump { label } => target(p, label) <= pc,
                _ => false,
            });
            reads * if looping { bound as usize + 1 } else { 1 }
        })
        .sum()
}

/// Values a read may return: initial values and program literals, then
/// values written under earlier guesses, for as many rounds as a chain of
/// data dependencies can be long.
fn value_domain(test: &LitmusTest, bound: u32) -> BTreeSet<i64> {
    let mut d: BTreeSet<i64> = test.locations().iter().map(|l| test.initial_value(l)).collect();
    for p in &test.processes {
        for i in &p.code {
            if let Instruction::Write { value, .. } | Instruction::Mov { value, .. } = i {
                literals(value, &mut d);
            }
        }
    }
    for _ in 0..max_reads(test, bound) {
        let mut next = d.clone();
        for p in &test.processes {
            for t in traces(p, &d, bound) {
                next.extend(t.events.iter().filter(|e| e.kind == "W").filter_map(|e| e.value));
            }
        }
        if next == d {
            break;
        }
        d = next;
    }
    d
}

struct Flat {
    key: String,
    kind: &'static str,
    loc: Option<String>,
    value: Option<i64>,
    /// Global indices of the reads a write depends on.
    deps: Vec<usize>,
}

fn has_cycle(edges: &BTreeMap<usize, Vec<usize>>) -> bool {
    fn visit(n: usize, edges: &BTreeMap<usize, Vec<usize>>, state: &mut BTreeMap<usize, u8>) -> bool {
        match state.get(&n) {
            Some(1) => return true,
            Some(2) => return false,
            _ => {}
        }
        state.insert(n, 1);
        for &m in edges.get(&n).into_iter().flatten() {
            if visit(m, edges, state) {
                return true;
            }
        }
        state.insert(n, 2);
        false
    }
    let mut state = BTreeMap::new();
    edges.keys().any(|&n| visit(n, edges, &mut state))
}

fn render(events: &[Flat], rf: &[(usize, usize)], co: &[(usize, usize)], regs: &[String]) -> String {
    let opt = |x: &Option<String>| x.clone().unwrap_or("-".into());
    let val = |x: Option<i64>| x.map(|v| v.to_string()).unwrap_or("-".into());
    let evs = events
        .iter()
        .map(|e| format!("{} {} {} {}", e.key, e.kind, opt(&e.loc), val(e.value)))
        .sorted()
        .join(", ");
    let pairs = |r: &[(usize, usize)]| {
        r.iter()
            .map(|(a, b)| format!("{}->{}", events[*a].key, events[*b].key))
            .sorted()
            .join(", ")
    };
    format!("events [{evs}] rf [{}] co [{}] regs [{}]", pairs(rf), pairs(co), regs.join(", "))
}

/// Canonical rendering of every anarchic candidate, sorted.
pub fn candidates(test: &LitmusTest, bound: u32) -> Vec<String> {
    let domain = value_domain(test, bound);
    let per_thread: Vec<Vec<Trace>> = test.processes.iter().map(|p| traces(p, &domain, bound)).collect();
    let mut out = Vec::new();
    for combo in per_thread.iter().map(|ts| ts.iter()).multi_cartesian_product() {
        let mut events = Vec::new();
        for l in test.locations() {
            events.push(Flat {
                key: format!("IW.{l}"),
                kind: "IW",
                loc: Some(l.to_string()),
                value: Some(test.initial_value(l)),
                deps: Vec::new(),
            });
        }
        let mut regs = Vec::new();
        for (p, t) in combo.iter().enumerate() {
            let base = events.len();
            for (i, e) in t.events.iter().enumerate() {
                events.push(Flat {
                    key: format!("P{p}.{i}"),
                    kind: e.kind,
                    loc: e.loc.clone(),
                    value: e.value,
                    deps: e.deps.iter().map(|d| base + d).collect(),
                });
            }
            regs.extend(t.regs.iter().map(|(r, v)| format!("{p}:{r}={v}")));
        }
        let writes = |e: &Flat| e.kind == "W" || e.kind == "IW";
        let reads: Vec<usize> = (0..events.len()).filter(|&i| events[i].kind == "R").collect();
        let sources: Vec<Vec<usize>> = reads
            .iter()
            .map(|&r| {
                (0..events.len())
                    .filter(|&w| writes(&events[w]) && events[w].loc == events[r].loc && events[w].value == events[r].value)
                    .collect()
            })
            .collect();
        let mut cos: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
        for l in test.locations() {
            let ws: Vec<usize> = (0..events.len())
                .filter(|&w| events[w].kind == "W" && events[w].loc.as_deref() == Some(l))
                .collect();
            let init = events.iter().position(|e| e.key == format!("IW.{l}")).unwrap();
            let orders: Vec<Vec<usize>> = ws.iter().copied().permutations(ws.len()).collect();
            cos = cos
                .into_iter()
                .cartesian_product(orders)
                .map(|(mut acc, order)| {
                    let chain: Vec<usize> = std::iter::once(init).chain(order).collect();
                    for (i, a) in chain.iter().enumerate() {
                        for b in &chain[i + 1..] {
                            acc.push((*a, *b));
                        }
                    }
                    acc
                })
                .collect();
        }
        for choice in sources.iter().map(|s| s.iter().copied()).multi_cartesian_product() {
            let rf: Vec<(usize, usize)> = choice.iter().copied().zip(reads.iter().copied()).collect();
            let edges: BTreeMap<usize, Vec<usize>> = rf.iter().map(|&(w, r)| (r, events[w].deps.clone())).collect();
            if has_cycle(&edges) {
                continue;
            }
            for co in &cos {
                out.push(render(&events, &rf, co, &regs));
            }
        }
    }
    out.sort();
    out
}

/// The same rendering for a candidate produced by the engine.
pub fn engine_key(c: &CandidateExecution) -> String {
    let events: Vec<Flat> = c
        .events
        .iter()
        .map(|e| Flat {
            key: match e.proc {
                Some(p) => format!("P{p}.{}", e.po_index),
                None => format!("IW.{}", e.location.as_deref().unwrap()),
            },
            kind: match e.kind.to_string().as_str() {
                "IW" => "IW",
                "W" => "W",
                "R" => "R",
                "F" => "F",
                _ => "B",
            },
            loc: e.location.clone(),
            value: e.value,
            deps: Vec::new(),
        })
        .collect();
    let regs: Vec<String> = c.final_regs.iter().map(|((p, r), v)| format!("{p}:{r}={v}")).collect();
    render(&events, &c.rf.pairs().collect::<Vec<_>>(), &c.co.pairs().collect::<Vec<_>>(), &regs)
}
