//! Bounded control paths of a single process.
//!
//! Each process is executed symbolically: a read yields a fresh pythia
//! variable standing for whatever value it will observe, registers hold
//! expressions over those variables, and every conditional branch forks the
//! path, recording the branch outcome as a constraint to be checked once
//! communications fix the read values.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::execution::EventKind;
use crate::lisa::{BinOp, Expr, Instruction, Process, UnOp};
use crate::relation::Relation;

pub const DEFAULT_BOUND: u32 = 2;
pub const DEFAULT_CEILING: usize = 10_000;

/// The value returned by one read event instance, identified by its process
/// and its position in that process's path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PythiaVar {
    pub proc: usize,
    pub po_index: usize,
}

impl fmt::Display for PythiaVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}_{}", self.proc, self.po_index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("arithmetic overflow")]
pub struct Overflow;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SymExpr {
    Const(i64),
    Var(PythiaVar),
    Unop(UnOp, Box<SymExpr>),
    Binop(BinOp, Box<SymExpr>, Box<SymExpr>),
}

impl SymExpr {
    /// Strict evaluation: `Ok(None)` as soon as any variable is unknown.
    pub fn eval(&self, lookup: &impl Fn(PythiaVar) -> Option<i64>) -> Result<Option<i64>, Overflow> {
        Ok(match self {
            SymExpr::Const(v) => Some(*v),
            SymExpr::Var(p) => lookup(*p),
            SymExpr::Unop(op, e) => match e.eval(lookup)? {
                Some(v) => Some(op.apply(v).ok_or(Overflow)?),
                None => None,
            },
            SymExpr::Binop(op, a, b) => match (a.eval(lookup)?, b.eval(lookup)?) {
                (Some(x), Some(y)) => Some(op.apply(x, y).ok_or(Overflow)?),
                _ => None,
            },
        })
    }

    pub fn vars(&self, out: &mut Vec<PythiaVar>) {
        match self {
            SymExpr::Const(_) => {}
            SymExpr::Var(p) => out.push(*p),
            SymExpr::Unop(_, e) => e.vars(out),
            SymExpr::Binop(_, a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    pub fn as_const(&self) -> Option<i64> {
        match self {
            SymExpr::Const(v) => Some(*v),
            _ => None,
        }
    }

    /// Substitutes register contents into `e`, folding constant subterms.
    fn from_expr(e: &Expr, regs: &BTreeMap<String, SymExpr>) -> Result<SymExpr, Overflow> {
        Ok(match e {
            Expr::Const(v) => SymExpr::Const(*v),
            Expr::Reg(r) => regs.get(r).cloned().unwrap_or(SymExpr::Const(0)),
            Expr::Unop(op, a) => match SymExpr::from_expr(a, regs)? {
                SymExpr::Const(v) => SymExpr::Const(op.apply(v).ok_or(Overflow)?),
                a => SymExpr::Unop(*op, Box::new(a)),
            },
            Expr::Binop(op, a, b) => {
                match (SymExpr::from_expr(a, regs)?, SymExpr::from_expr(b, regs)?) {
                    (SymExpr::Const(x), SymExpr::Const(y)) => {
                        SymExpr::Const(op.apply(x, y).ok_or(Overflow)?)
                    }
                    (a, b) => SymExpr::Binop(*op, Box::new(a), Box::new(b)),
                }
            }
        })
    }
}

impl fmt::Display for SymExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymExpr::Const(v) => write!(f, "{v}"),
            SymExpr::Var(p) => write!(f, "{p}"),
            SymExpr::Unop(op, e) => write!(f, "({} {e})", op.mnemonic()),
            SymExpr::Binop(op, a, b) => write!(f, "({} {a} {b})", op.mnemonic()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathEvent {
    pub kind: EventKind,
    pub annotations: Vec<String>,
    /// Set for `W` and `R`.
    pub location: Option<String>,
    /// Written value for `W`, the fresh variable for `R`, the branch
    /// condition for `B`.
    pub value: Option<SymExpr>,
}

/// Outcome of one executed conditional branch: `expr` must be non-zero when
/// `taken`, zero otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub expr: SymExpr,
    pub taken: bool,
}

impl Constraint {
    pub fn holds(&self, value: i64) -> bool {
        (value != 0) == self.taken
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessPath {
    pub proc: usize,
    pub events: Vec<PathEvent>,
    pub constraints: Vec<Constraint>,
    /// Register contents at termination.
    pub final_regs: BTreeMap<String, SymExpr>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnrollConfig {
    /// How many times each backward branch may be taken on one path.
    pub bound: u32,
    /// Maximum number of terminating paths per process.
    pub ceiling: usize,
    /// Stop at the ceiling and keep what was found instead of failing.
    pub partial: bool,
}

impl Default for UnrollConfig {
    fn default() -> Self {
        UnrollConfig {
            bound: DEFAULT_BOUND,
            ceiling: DEFAULT_CEILING,
            partial: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnrollError {
    #[error("unroll bound must be at least 1")]
    InvalidBound,
    #[error("unroll budget exceeded in P{proc}: more than {ceiling} paths")]
    BudgetExceeded { proc: usize, ceiling: usize },
    #[error("arithmetic overflow while unrolling P{proc}")]
    Overflow { proc: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unrolled {
    pub paths: Vec<ProcessPath>,
    /// Paths abandoned because a backward branch exceeded the bound.
    pub discarded: usize,
    /// The ceiling was hit in partial mode; `paths` is incomplete.
    pub truncated: bool,
}

#[derive(Clone)]
struct State {
    pc: usize,
    regs: BTreeMap<String, SymExpr>,
    events: Vec<PathEvent>,
    constraints: Vec<Constraint>,
    /// Times each backward branch (by instruction index) has been taken.
    back_taken: Vec<u32>,
}

/// Enumerates every terminating path of `process` in which no backward
/// branch is taken more than `config.bound` times. Fall-through successors
/// are explored before taken ones, so the order is deterministic.
pub fn unroll(process: &Process, config: &UnrollConfig) -> Result<Unrolled, UnrollError> {
    if config.bound == 0 {
        return Err(UnrollError::InvalidBound);
    }
    let proc = process.id;
    let overflow = |_| UnrollError::Overflow { proc };
    let code = &process.code;
    let target = |label: &str| {
        process
            .label_target(label)
            .expect("branch targets are resolved by validation")
    };

    let mut out = Unrolled {
        paths: Vec::new(),
        discarded: 0,
        truncated: false,
    };
    let mut stack = vec![State {
        pc: 0,
        regs: BTreeMap::new(),
        events: Vec::new(),
        constraints: Vec::new(),
        back_taken: vec![0; code.len()],
    }];

    while let Some(mut st) = stack.pop() {
        // Runs `st` until it terminates, is discarded, or forks.
        loop {
            let Some(instr) = code.get(st.pc) else {
                if out.paths.len() == config.ceiling {
                    if config.partial {
                        out.truncated = true;
                        return Ok(out);
                    }
                    return Err(UnrollError::BudgetExceeded {
                        proc,
                        ceiling: config.ceiling,
                    });
                }
                let mut final_regs = st.regs;
                for r in process.registers() {
                    final_regs
                        .entry(r.to_string())
                        .or_insert(SymExpr::Const(0));
                }
                out.paths.push(ProcessPath {
                    proc,
                    events: st.events,
                    constraints: st.constraints,
                    final_regs,
                });
                break;
            };
            match instr {
                Instruction::Label(_) => st.pc += 1,
                Instruction::Mov { register, value } => {
                    let v = SymExpr::from_expr(value, &st.regs).map_err(overflow)?;
                    st.regs.insert(register.clone(), v);
                    st.pc += 1;
                }
                Instruction::Write {
                    annotations,
                    location,
                    value,
                } => {
                    let v = SymExpr::from_expr(value, &st.regs).map_err(overflow)?;
                    st.events.push(PathEvent {
                        kind: EventKind::W,
                        annotations: annotations.clone(),
                        location: Some(location.clone()),
                        value: Some(v),
                    });
                    st.pc += 1;
                }
                Instruction::Read {
                    annotations,
                    register,
                    location,
                } => {
                    let var = SymExpr::Var(PythiaVar {
                        proc,
                        po_index: st.events.len(),
                    });
                    st.events.push(PathEvent {
                        kind: EventKind::R,
                        annotations: annotations.clone(),
                        location: Some(location.clone()),
                        value: Some(var.clone()),
                    });
                    st.regs.insert(register.clone(), var);
                    st.pc += 1;
                }
                Instruction::Fence { annotations } => {
                    st.events.push(PathEvent {
                        kind: EventKind::F,
                        annotations: annotations.clone(),
                        location: None,
                        value: None,
                    });
                    st.pc += 1;
                }
                Instruction::Jump { label } => {
                    let to = target(label);
                    if !take(&mut st, to, config.bound) {
                        out.discarded += 1;
                        break;
                    }
                }
                Instruction::Branch {
                    annotations,
                    register,
                    label,
                } => {
                    let cond = st.regs.get(register).cloned().unwrap_or(SymExpr::Const(0));
                    st.events.push(PathEvent {
                        kind: EventKind::B,
                        annotations: annotations.clone(),
                        location: None,
                        value: Some(cond.clone()),
                    });
                    let to = target(label);
                    let (may_fall, may_take) = match cond.as_const() {
                        Some(v) => (v == 0, v != 0),
                        None => (true, true),
                    };
                    let mut taken = may_take.then(|| {
                        let mut t = st.clone();
                        t.constraints.push(Constraint {
                            expr: cond.clone(),
                            taken: true,
                        });
                        t
                    });
                    if let Some(t) = &mut taken {
                        if !take(t, to, config.bound) {
                            out.discarded += 1;
                            taken = None;
                        }
                    }
                    if may_fall {
                        // Pushed first so that fall-through is popped first.
                        if let Some(t) = taken {
                            stack.push(t);
                        }
                        st.constraints.push(Constraint {
                            expr: cond,
                            taken: false,
                        });
                        st.pc += 1;
                    } else if let Some(t) = taken {
                        st = t;
                    } else {
                        break;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Moves `st` to `to`, counting backward jumps. Returns false when the
/// branch at the current pc has already been taken `bound` times.
fn take(st: &mut State, to: usize, bound: u32) -> bool {
    if to <= st.pc {
        let n = &mut st.back_taken[st.pc];
        if *n == bound {
            return false;
        }
        *n += 1;
    }
    st.pc = to;
    true
}

/// Program order over one path per process, with the events of process `i`
/// numbered consecutively from `offsets[i]` in a universe of `n` events.
pub fn program_order(paths: &[&ProcessPath], offsets: &[usize], n: usize) -> Relation {
    let mut po = Relation::empty(n);
    for (path, &base) in paths.iter().zip(offsets) {
        let len = path.events.len();
        for i in 0..len {
            for j in i + 1..len {
                po.insert(base + i, base + j);
            }
        }
    }
    po
}
