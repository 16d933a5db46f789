use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

/// Opaque annotation tags written inside `[...]` after a mnemonic.
pub type Annotations = Vec<String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnOp {
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BinOp {
    Add,
    Sub,
    And,
    Or,
    Xor,
    Eq,
    Neq,
}

impl UnOp {
    pub fn mnemonic(self) -> &'static str {
        match self {
            UnOp::Not => "not",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<Self> {
        match s {
            "not" => Some(UnOp::Not),
            _ => None,
        }
    }

    /// Returns `None` on arithmetic overflow.
    pub fn apply(self, v: i64) -> Option<i64> {
        match self {
            UnOp::Not => Some((v == 0) as i64),
        }
    }
}

impl BinOp {
    pub fn mnemonic(self) -> &'static str {
        match self {
            BinOp::Add => "add",
            BinOp::Sub => "sub",
            BinOp::And => "and",
            BinOp::Or => "or",
            BinOp::Xor => "xor",
            BinOp::Eq => "eq",
            BinOp::Neq => "neq",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<Self> {
        Some(match s {
            "add" => BinOp::Add,
            "sub" => BinOp::Sub,
            "and" => BinOp::And,
            "or" => BinOp::Or,
            "xor" => BinOp::Xor,
            "eq" => BinOp::Eq,
            "neq" => BinOp::Neq,
            _ => return None,
        })
    }

    /// Returns `None` on arithmetic overflow.
    pub fn apply(self, a: i64, b: i64) -> Option<i64> {
        match self {
            BinOp::Add => a.checked_add(b),
            BinOp::Sub => a.checked_sub(b),
            BinOp::And => Some(a & b),
            BinOp::Or => Some(a | b),
            BinOp::Xor => Some(a ^ b),
            BinOp::Eq => Some((a == b) as i64),
            BinOp::Neq => Some((a != b) as i64),
        }
    }
}

/// Expression over the registers of one process.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(i64),
    Reg(String),
    Unop(UnOp, Box<Expr>),
    Binop(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn registers<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Expr::Const(_) => {}
            Expr::Reg(r) => {
                out.insert(r);
            }
            Expr::Unop(_, e) => e.registers(out),
            Expr::Binop(_, a, b) => {
                a.registers(out);
                b.registers(out);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => write!(f, "{v}"),
            Expr::Reg(r) => write!(f, "{r}"),
            Expr::Unop(op, e) => write!(f, "({} {e})", op.mnemonic()),
            Expr::Binop(op, a, b) => write!(f, "({} {a} {b})", op.mnemonic()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Instruction {
    /// `w[tags] loc expr`
    Write {
        annotations: Annotations,
        location: String,
        value: Expr,
    },
    /// `r[tags] reg loc`
    Read {
        annotations: Annotations,
        register: String,
        location: String,
    },
    /// `b[tags] reg label`: jumps when the register is non-zero.
    Branch {
        annotations: Annotations,
        register: String,
        label: String,
    },
    /// `j label`
    Jump { label: String },
    /// `mov reg expr`
    Mov { register: String, value: Expr },
    /// `f[tags]`
    Fence { annotations: Annotations },
    /// `name:` marks the position of the next instruction of the column.
    Label(String),
}

fn fmt_annotations(f: &mut fmt::Formatter<'_>, annotations: &Annotations) -> fmt::Result {
    write!(f, "[{}]", annotations.join(" "))
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Write {
                annotations,
                location,
                value,
            } => {
                f.write_str("w")?;
                fmt_annotations(f, annotations)?;
                write!(f, " {location} {value}")
            }
            Instruction::Read {
                annotations,
                register,
                location,
            } => {
                f.write_str("r")?;
                fmt_annotations(f, annotations)?;
                write!(f, " {register} {location}")
            }
            Instruction::Branch {
                annotations,
                register,
                label,
            } => {
                f.write_str("b")?;
                fmt_annotations(f, annotations)?;
                write!(f, " {register} {label}")
            }
            Instruction::Jump { label } => write!(f, "j {label}"),
            Instruction::Mov { register, value } => write!(f, "mov {register} {value}"),
            Instruction::Fence { annotations } => {
                f.write_str("f")?;
                fmt_annotations(f, annotations)
            }
            Instruction::Label(name) => write!(f, "{name}:"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Process {
    pub id: usize,
    pub code: Vec<Instruction>,
}

impl Process {
    /// Index of the marker for `label`, i.e. the position control reaches
    /// when jumping there.
    pub fn label_target(&self, label: &str) -> Option<usize> {
        self.code
            .iter()
            .position(|i| matches!(i, Instruction::Label(l) if l == label))
    }

    /// Every register the process mentions, in any position.
    pub fn registers(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        for instr in &self.code {
            match instr {
                Instruction::Write { value, .. } => value.registers(&mut out),
                Instruction::Read { register, .. } | Instruction::Branch { register, .. } => {
                    out.insert(register.as_str());
                }
                Instruction::Mov { register, value } => {
                    out.insert(register.as_str());
                    value.registers(&mut out);
                }
                Instruction::Jump { .. } | Instruction::Fence { .. } | Instruction::Label(_) => {}
            }
        }
        out
    }

    pub fn locations(&self) -> impl Iterator<Item = &str> {
        self.code.iter().filter_map(|i| match i {
            Instruction::Write { location, .. } | Instruction::Read { location, .. } => {
                Some(location.as_str())
            }
            _ => None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Quantifier {
    #[serde(rename = "exists")]
    Exists,
    #[serde(rename = "~exists")]
    NotExists,
    #[serde(rename = "forall")]
    Forall,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Exists => "exists",
            Quantifier::NotExists => "~exists",
            Quantifier::Forall => "forall",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Observable {
    Reg { proc: usize, reg: String },
    Loc { loc: String },
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Reg { proc, reg } => write!(f, "{proc}:{reg}"),
            Observable::Loc { loc } => f.write_str(loc),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Prop {
    True,
    False,
    Atom(Observable, i64),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
}

impl Prop {
    pub fn eval(&self, lookup: &impl Fn(&Observable) -> Option<i64>) -> bool {
        match self {
            Prop::True => true,
            Prop::False => false,
            Prop::Atom(obs, v) => lookup(obs) == Some(*v),
            Prop::Not(p) => !p.eval(lookup),
            Prop::And(a, b) => a.eval(lookup) && b.eval(lookup),
            Prop::Or(a, b) => a.eval(lookup) || b.eval(lookup),
        }
    }

    pub fn atoms<'a>(&'a self, out: &mut Vec<&'a Observable>) {
        match self {
            Prop::True | Prop::False => {}
            Prop::Atom(o, _) => out.push(o),
            Prop::Not(p) => p.atoms(out),
            Prop::And(a, b) | Prop::Or(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 0: disjunction context, 1: conjunction, 2: operand of ~
        match self {
            Prop::True => f.write_str("true"),
            Prop::False => f.write_str("false"),
            Prop::Atom(o, v) => write!(f, "{o}={v}"),
            Prop::Not(p) => {
                f.write_str("~")?;
                p.fmt_prec(f, 2)
            }
            Prop::And(a, b) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 1)?;
                f.write_str(" /\\ ")?;
                b.fmt_prec(f, 2)?;
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Prop::Or(a, b) => {
                if prec > 0 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 0)?;
                f.write_str(" \\/ ")?;
                b.fmt_prec(f, 1)?;
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub quantifier: Quantifier,
    pub body: Prop,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.quantifier.keyword(), self.body)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LitmusTest {
    pub name: String,
    /// Free-form lines between the header and the prelude, kept verbatim.
    pub metadata: Vec<String>,
    pub prelude: Vec<(String, i64)>,
    pub processes: Vec<Process>,
    pub final_cond: Condition,
    /// Distinct annotation lists seen on memory, fence and branch instructions.
    /// Filled in by validation.
    pub annotation_universe: BTreeSet<Vec<String>>,
}

impl LitmusTest {
    /// Every shared location named in the prelude or accessed by a process.
    pub fn locations(&self) -> BTreeSet<&str> {
        let mut out: BTreeSet<&str> = self.prelude.iter().map(|(l, _)| l.as_str()).collect();
        for p in &self.processes {
            out.extend(p.locations());
        }
        out
    }

    /// Initial value of a location; absent locations start at zero.
    pub fn initial_value(&self, loc: &str) -> i64 {
        self.prelude
            .iter()
            .rev()
            .find(|(l, _)| l == loc)
            .map(|(_, v)| *v)
            .unwrap_or(0)
    }

    /// Distinct annotation tags across the program.
    pub fn tags(&self) -> BTreeSet<&str> {
        self.annotation_universe
            .iter()
            .flat_map(|a| a.iter().map(String::as_str))
            .collect()
    }

    /// Observables reported in final states: condition registers, then every
    /// shared location (including ones only named by the condition).
    pub fn observables(&self) -> Vec<Observable> {
        let mut atoms = Vec::new();
        self.final_cond.body.atoms(&mut atoms);
        let mut out: BTreeSet<Observable> = atoms
            .into_iter()
            .filter(|o| matches!(o, Observable::Reg { .. }))
            .cloned()
            .collect();
        for loc in self.locations() {
            out.insert(Observable::Loc {
                loc: loc.to_string(),
            });
        }
        out.into_iter().collect()
    }
}
