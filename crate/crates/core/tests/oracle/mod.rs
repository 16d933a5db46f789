//! Reference semantics written against the litmus AST only: operational
//! interleaving machines for SC and TSO, and a brute-force enumerator of
//! anarchic candidates.

#![allow(dead_code)]

pub mod anarchic;
pub mod sc;
pub mod tso;

use std::collections::{BTreeMap, BTreeSet};

use litmusforge::lisa::{BinOp, Expr, Instruction, LitmusTest, Observable, Process, UnOp};

pub type Regs = BTreeMap<String, i64>;
pub type Outcome = BTreeMap<Observable, i64>;

pub fn eval(e: &Expr, regs: &Regs) -> i64 {
    match e {
        Expr::Const(c) => *c,
        Expr::Reg(r) => regs.get(r).copied().unwrap_or(0),
        Expr::Unop(UnOp::Not, a) => (eval(a, regs) == 0) as i64,
        Expr::Binop(op, a, b) => {
            let (a, b) = (eval(a, regs), eval(b, regs));
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::And => a & b,
                BinOp::Or => a | b,
                BinOp::Xor => a ^ b,
                BinOp::Eq => (a == b) as i64,
                BinOp::Neq => (a != b) as i64,
            }
        }
    }
}

pub fn target(p: &Process, label: &str) -> usize {
    p.code
        .iter()
        .position(|i| matches!(i, Instruction::Label(l) if l == label))
        .unwrap()
}

/// Control state of one thread in the machines.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Thread {
    pub pc: usize,
    pub regs: Regs,
    /// Backward transfers taken, per instruction index.
    pub back: BTreeMap<usize, u32>,
}

impl Thread {
    pub fn new() -> Self {
        Thread {
            pc: 0,
            regs: Regs::new(),
            back: BTreeMap::new(),
        }
    }

    /// Moves to `label`; `false` when that would exceed the bound.
    fn goto(&mut self, p: &Process, label: &str, bound: u32) -> bool {
        let to = target(p, label);
        if to <= self.pc {
            let n = self.back.entry(self.pc).or_insert(0);
            if *n == bound {
                return false;
            }
            *n += 1;
        }
        self.pc = to;
        true
    }

    /// Runs labels, moves, jumps and branches until the next memory or
    /// fence instruction. `false` when the thread left the bound.
    pub fn settle(&mut self, p: &Process, bound: u32) -> bool {
        while let Some(i) = p.code.get(self.pc) {
            match i {
                Instruction::Label(_) => self.pc += 1,
                Instruction::Mov { register, value } => {
                    let v = eval(value, &self.regs);
                    self.regs.insert(register.clone(), v);
                    self.pc += 1;
                }
                Instruction::Jump { label } => {
                    if !self.goto(p, label, bound) {
                        return false;
                    }
                }
                Instruction::Branch { register, label, .. } => {
                    if self.regs.get(register).copied().unwrap_or(0) != 0 {
                        if !self.goto(p, label, bound) {
                            return false;
                        }
                    } else {
                        self.pc += 1;
                    }
                }
                _ => return true,
            }
        }
        true
    }
}

/// Condition registers plus every location.
pub fn outcome(test: &LitmusTest, threads: &[Thread], memory: &BTreeMap<String, i64>) -> Outcome {
    let mut atoms = Vec::new();
    test.final_cond.body.atoms(&mut atoms);
    let mut out = Outcome::new();
    for a in atoms {
        if let Observable::Reg { proc, reg } = a {
            out.insert(a.clone(), threads[*proc].regs.get(reg).copied().unwrap_or(0));
        }
    }
    for l in test.locations() {
        out.insert(Observable::Loc { loc: l.to_string() }, memory[l]);
    }
    out
}

pub fn initial_memory(test: &LitmusTest) -> BTreeMap<String, i64> {
    let mut m: BTreeMap<String, i64> = test.locations().into_iter().map(|l| (l.to_string(), 0)).collect();
    for (l, v) in &test.prelude {
        m.insert(l.clone(), *v);
    }
    m
}

pub type Outcomes = BTreeSet<Outcome>;
