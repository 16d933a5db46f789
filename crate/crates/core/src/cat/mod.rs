//! A subset of the cat language for consistency models.
//!
//! A model is an optional name line followed by statements:
//!
//! ```text
//! "TSO"
//! let com = rf | co | fr
//! acyclic (po & loc) | com as uniproc
//! ```
//!
//! Statements are `let x = e`, `acyclic e`, `irreflexive e` and `empty e`,
//! each check optionally named with `as name`. Operators, loosest first:
//! `|`, `;`, `\`, `&`, binary `*` (cartesian product of sets), prefix `~`
//! (complement), postfix `^-1`, `+`, `*`. `[S]` lifts a set to a relation.
//! Comments are `// ...` and `(* ... *)`.

mod eval;
mod parser;

use std::fmt;

use thiserror::Error;

pub(crate) use eval::check_in;
pub use eval::{check, eval_expr, Env, ModelVerdict, Value};
pub use parser::{parse_cat, parse_cat_with_tags};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct CatError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ty {
    Set,
    Rel,
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ty::Set => "event set",
            Ty::Rel => "relation",
        })
    }
}

/// Names bound in every environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Predefined {
    Po,
    Rf,
    Co,
    Fr,
    Loc,
    Ext,
    Int,
    Id,
    R,
    W,
    F,
    B,
    IW,
    M,
}

impl Predefined {
    pub const ALL: [Predefined; 14] = [
        Predefined::Po,
        Predefined::Rf,
        Predefined::Co,
        Predefined::Fr,
        Predefined::Loc,
        Predefined::Ext,
        Predefined::Int,
        Predefined::Id,
        Predefined::R,
        Predefined::W,
        Predefined::F,
        Predefined::B,
        Predefined::IW,
        Predefined::M,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Predefined::Po => "po",
            Predefined::Rf => "rf",
            Predefined::Co => "co",
            Predefined::Fr => "fr",
            Predefined::Loc => "loc",
            Predefined::Ext => "ext",
            Predefined::Int => "int",
            Predefined::Id => "id",
            Predefined::R => "R",
            Predefined::W => "W",
            Predefined::F => "F",
            Predefined::B => "B",
            Predefined::IW => "IW",
            Predefined::M => "M",
        }
    }

    pub fn lookup(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn ty(self) -> Ty {
        match self {
            Predefined::R
            | Predefined::W
            | Predefined::F
            | Predefined::B
            | Predefined::IW
            | Predefined::M => Ty::Set,
            _ => Ty::Rel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Name {
    Predefined(Predefined),
    /// A `let` binding, stored in environment slot `slot`.
    Let { name: String, slot: usize },
    /// Events carrying an annotation tag.
    Tag(String),
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Name::Predefined(p) => f.write_str(p.name()),
            Name::Let { name, .. } | Name::Tag(name) => f.write_str(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RelExpr {
    Base(Name),
    Union(Box<RelExpr>, Box<RelExpr>),
    Intersection(Box<RelExpr>, Box<RelExpr>),
    Difference(Box<RelExpr>, Box<RelExpr>),
    Sequence(Box<RelExpr>, Box<RelExpr>),
    Cartesian(Box<RelExpr>, Box<RelExpr>),
    Inverse(Box<RelExpr>),
    TransClosure(Box<RelExpr>),
    ReflTransClosure(Box<RelExpr>),
    Complement(Box<RelExpr>),
    /// `[S]`
    Lift(Box<RelExpr>),
}

impl RelExpr {
    fn prec(&self) -> u8 {
        match self {
            RelExpr::Union(..) => 0,
            RelExpr::Sequence(..) => 1,
            RelExpr::Difference(..) => 2,
            RelExpr::Intersection(..) => 3,
            RelExpr::Cartesian(..) => 4,
            RelExpr::Complement(..) => 5,
            RelExpr::Inverse(..) | RelExpr::TransClosure(..) | RelExpr::ReflTransClosure(..) => 6,
            RelExpr::Base(..) | RelExpr::Lift(..) => 7,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let p = self.prec();
        if p < min {
            f.write_str("(")?;
        }
        let bin = |f: &mut fmt::Formatter<'_>, a: &RelExpr, op: &str, b: &RelExpr| {
            a.fmt_at(f, p)?;
            f.write_str(op)?;
            b.fmt_at(f, p + 1)
        };
        match self {
            RelExpr::Base(n) => write!(f, "{n}")?,
            RelExpr::Union(a, b) => bin(f, a, " | ", b)?,
            RelExpr::Sequence(a, b) => bin(f, a, ";", b)?,
            RelExpr::Difference(a, b) => bin(f, a, " \\ ", b)?,
            RelExpr::Intersection(a, b) => bin(f, a, " & ", b)?,
            RelExpr::Cartesian(a, b) => bin(f, a, "*", b)?,
            RelExpr::Complement(a) => {
                f.write_str("~")?;
                a.fmt_at(f, p)?;
            }
            RelExpr::Inverse(a) => {
                a.fmt_at(f, p)?;
                f.write_str("^-1")?;
            }
            RelExpr::TransClosure(a) => {
                a.fmt_at(f, p)?;
                f.write_str("+")?;
            }
            RelExpr::ReflTransClosure(a) => {
                a.fmt_at(f, p)?;
                f.write_str("*")?;
            }
            RelExpr::Lift(a) => {
                f.write_str("[")?;
                a.fmt_at(f, 0)?;
                f.write_str("]")?;
            }
        }
        if p < min {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for RelExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckKind {
    Acyclic,
    Irreflexive,
    Empty,
}

impl CheckKind {
    pub fn keyword(self) -> &'static str {
        match self {
            CheckKind::Acyclic => "acyclic",
            CheckKind::Irreflexive => "irreflexive",
            CheckKind::Empty => "empty",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Let {
        name: String,
        slot: usize,
        expr: RelExpr,
        ty: Ty,
        line: usize,
    },
    Check {
        kind: CheckKind,
        expr: RelExpr,
        name: String,
        line: usize,
    },
}

/// A parsed, name-resolved and type-checked model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatModel {
    pub name: String,
    pub statements: Vec<Statement>,
    /// Number of `let` slots an evaluation needs.
    pub slots: usize,
}

impl CatModel {
    pub fn checks(&self) -> impl Iterator<Item = (CheckKind, &RelExpr, &str)> {
        self.statements.iter().filter_map(|s| match s {
            Statement::Check { kind, expr, name, .. } => Some((*kind, expr, name.as_str())),
            Statement::Let { .. } => None,
        })
    }

    /// Appends a named check; used to strengthen a model programmatically.
    pub fn with_check(mut self, kind: CheckKind, expr: RelExpr, name: &str) -> Self {
        self.statements.push(Statement::Check {
            kind,
            expr,
            name: name.to_string(),
            line: 0,
        });
        self
    }
}
