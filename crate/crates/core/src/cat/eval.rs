use std::collections::BTreeMap;

use super::{CatModel, CheckKind, Name, Predefined, RelExpr, Statement};
use crate::execution::{CandidateExecution, EventKind};
use crate::relation::{EventSet, Relation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Set(EventSet),
    Rel(Relation),
}

impl Value {
    fn rel(self) -> Relation {
        match self {
            Value::Rel(r) => r,
            Value::Set(_) => unreachable!("type checker admits only relations here"),
        }
    }

    fn set(self) -> EventSet {
        match self {
            Value::Set(s) => s,
            Value::Rel(_) => unreachable!("type checker admits only sets here"),
        }
    }
}

/// Predefined relations and sets of one candidate, plus `let` slots.
#[derive(Debug, Clone)]
pub struct Env {
    n: usize,
    /// Control paths the static part was computed for.
    paths: Vec<usize>,
    base: Vec<Value>,
    tags: BTreeMap<String, EventSet>,
    slots: Vec<Option<Value>>,
}

impl Env {
    pub fn new(c: &CandidateExecution) -> Self {
        let n = c.events.len();
        let set_of = |f: &dyn Fn(EventKind) -> bool| {
            EventSet::of(n, c.events.iter().filter(|e| f(e.kind)).map(|e| e.id))
        };
        let mut loc = Relation::empty(n);
        let mut int = Relation::identity(n);
        for a in &c.events {
            for b in &c.events {
                if a.location.is_some() && a.location == b.location {
                    loc.insert(a.id, b.id);
                }
                if a.proc.is_some() && a.proc == b.proc {
                    int.insert(a.id, b.id);
                }
            }
        }
        let ext = int.complement();
        let mut tags: BTreeMap<String, EventSet> = BTreeMap::new();
        for e in &c.events {
            for t in &e.annotations {
                tags.entry(t.clone())
                    .or_insert_with(|| EventSet::empty(n))
                    .insert(e.id);
            }
        }
        let base = Predefined::ALL
            .iter()
            .map(|p| match p {
                Predefined::Po => Value::Rel(c.po.clone()),
                Predefined::Rf => Value::Rel(c.rf.clone()),
                Predefined::Co => Value::Rel(c.co.clone()),
                Predefined::Fr => Value::Rel(c.fr()),
                Predefined::Loc => Value::Rel(loc.clone()),
                Predefined::Ext => Value::Rel(ext.clone()),
                Predefined::Int => Value::Rel(int.clone()),
                Predefined::Id => Value::Rel(Relation::identity(n)),
                Predefined::R => Value::Set(set_of(&|k| k == EventKind::R)),
                Predefined::W => Value::Set(set_of(&|k| k == EventKind::W)),
                Predefined::F => Value::Set(set_of(&|k| k == EventKind::F)),
                Predefined::B => Value::Set(set_of(&|k| k == EventKind::B)),
                Predefined::IW => Value::Set(set_of(&|k| k == EventKind::IW)),
                Predefined::M => Value::Set(set_of(&|k| {
                    matches!(k, EventKind::R | EventKind::W | EventKind::IW)
                })),
            })
            .collect();
        Env {
            n,
            paths: c.chosen_paths.clone(),
            base,
            tags,
            slots: Vec::new(),
        }
    }

    /// Rebinds the environment to `c`. When `c` follows the same control
    /// paths as the current candidate only `rf`, `co` and `fr` change.
    pub fn rebind(&mut self, c: &CandidateExecution) {
        if c.chosen_paths != self.paths || c.events.len() != self.n {
            *self = Env::new(c);
            return;
        }
        for (i, p) in Predefined::ALL.iter().enumerate() {
            match p {
                Predefined::Rf => self.base[i] = Value::Rel(c.rf.clone()),
                Predefined::Co => self.base[i] = Value::Rel(c.co.clone()),
                Predefined::Fr => self.base[i] = Value::Rel(c.fr()),
                _ => {}
            }
        }
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    fn lookup(&self, name: &Name) -> Value {
        match name {
            Name::Predefined(p) => {
                let i = Predefined::ALL.iter().position(|q| q == p).unwrap();
                self.base[i].clone()
            }
            Name::Let { slot, name } => self.slots[*slot]
                .clone()
                .unwrap_or_else(|| panic!("{name} evaluated before its definition")),
            Name::Tag(t) => Value::Set(
                self.tags
                    .get(t)
                    .cloned()
                    .unwrap_or_else(|| EventSet::empty(self.n)),
            ),
        }
    }
}

/// Set-theoretic evaluation of a well-typed expression.
pub fn eval_expr(env: &Env, e: &RelExpr) -> Value {
    let n = env.n;
    match e {
        RelExpr::Base(name) => env.lookup(name),
        RelExpr::Union(a, b) => match (eval_expr(env, a), eval_expr(env, b)) {
            (Value::Set(x), Value::Set(y)) => Value::Set(x.union(&y)),
            (x, y) => Value::Rel(x.rel().union(&y.rel())),
        },
        RelExpr::Intersection(a, b) => match (eval_expr(env, a), eval_expr(env, b)) {
            (Value::Set(x), Value::Set(y)) => Value::Set(x.intersection(&y)),
            (x, y) => Value::Rel(x.rel().intersection(&y.rel())),
        },
        RelExpr::Difference(a, b) => match (eval_expr(env, a), eval_expr(env, b)) {
            (Value::Set(x), Value::Set(y)) => Value::Set(x.difference(&y)),
            (x, y) => Value::Rel(x.rel().difference(&y.rel())),
        },
        RelExpr::Sequence(a, b) => {
            Value::Rel(eval_expr(env, a).rel().compose(&eval_expr(env, b).rel()))
        }
        RelExpr::Cartesian(a, b) => Value::Rel(Relation::cartesian(
            &eval_expr(env, a).set(),
            &eval_expr(env, b).set(),
        )),
        RelExpr::Inverse(a) => Value::Rel(eval_expr(env, a).rel().inverse()),
        RelExpr::TransClosure(a) => Value::Rel(eval_expr(env, a).rel().transitive_closure()),
        RelExpr::ReflTransClosure(a) => {
            Value::Rel(eval_expr(env, a).rel().reflexive_transitive_closure())
        }
        RelExpr::Complement(a) => match eval_expr(env, a) {
            Value::Set(s) => Value::Set(s.complement()),
            Value::Rel(r) => Value::Rel(r.complement()),
        },
        RelExpr::Lift(a) => {
            let s = eval_expr(env, a).set();
            debug_assert_eq!(s.universe(), n);
            Value::Rel(Relation::lift(&s))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelVerdict {
    pub allowed: bool,
    /// Names of every failing check, in statement order.
    pub failed_checks: Vec<String>,
}

/// Runs every statement of `model` against `c`. All checks are evaluated,
/// so `failed_checks` is complete.
pub fn check(model: &CatModel, c: &CandidateExecution) -> ModelVerdict {
    let mut env = Env::new(c);
    check_in(model, &mut env)
}

pub(crate) fn check_in(model: &CatModel, env: &mut Env) -> ModelVerdict {
    env.slots = vec![None; model.slots];
    let mut failed = Vec::new();
    for s in &model.statements {
        match s {
            Statement::Let { slot, expr, .. } => {
                let v = eval_expr(env, expr);
                env.slots[*slot] = Some(v);
            }
            Statement::Check {
                kind, expr, name, ..
            } => {
                let ok = match (kind, eval_expr(env, expr)) {
                    (CheckKind::Acyclic, v) => v.rel().is_acyclic(),
                    (CheckKind::Irreflexive, v) => v.rel().is_irreflexive(),
                    (CheckKind::Empty, Value::Rel(r)) => r.is_empty(),
                    (CheckKind::Empty, Value::Set(s)) => s.is_empty(),
                };
                if !ok {
                    failed.push(name.clone());
                }
            }
        }
    }
    ModelVerdict {
        allowed: failed.is_empty(),
        failed_checks: failed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anarchic::{candidate_executions, EnumConfig};
    use crate::cat::parse_cat;
    use crate::lisa::load_litmus;

    const SB: &str = "LISA SB\n{}\nP0 | P1 ;\nw[] x 1 | w[] y 1 ;\nr[] r1 y | r[] r1 x ;\nexists (0:r1=0 /\\ 1:r1=0)\n";

    fn candidates(src: &str) -> Vec<CandidateExecution> {
        let t = load_litmus(src).unwrap();
        let mut out = Vec::new();
        candidate_executions(&t, &EnumConfig::default(), |c| out.push(c.clone())).unwrap();
        out
    }

    fn rel(env: &Env, src: &str) -> Relation {
        let m = parse_cat(&format!("let x = {src}")).unwrap();
        let Statement::Let { expr, .. } = &m.statements[0] else {
            unreachable!()
        };
        eval_expr(env, expr).rel()
    }

    #[test]
    fn rf_restricted_to_reads_is_rf() {
        for c in candidates(SB) {
            let env = Env::new(&c);
            assert_eq!(rel(&env, "rf;[R]"), c.rf);
            assert!(rel(&env, "(rf \\ rf);po").is_empty());
        }
    }

    #[test]
    fn empty_model_allows_everything() {
        let m = parse_cat("\"anarchic\"").unwrap();
        for c in candidates(SB) {
            assert!(check(&m, &c).allowed);
        }
    }

    #[test]
    fn sc_forbids_store_buffering_outcome() {
        let m = parse_cat("acyclic po | rf | fr | co as sc").unwrap();
        let cands = candidates(SB);
        let both_init = cands
            .iter()
            .find(|c| c.final_regs.values().all(|&v| v == 0))
            .unwrap();
        let v = check(&m, both_init);
        assert!(!v.allowed);
        assert_eq!(v.failed_checks, vec!["sc".to_string()]);
        assert_eq!(cands.iter().filter(|c| check(&m, c).allowed).count(), 3);
    }

    #[test]
    fn po_is_irreflexive() {
        let m = parse_cat("irreflexive po").unwrap();
        for c in candidates(SB) {
            assert!(check(&m, &c).allowed);
        }
    }

    #[test]
    fn all_failures_reported() {
        let m = parse_cat("empty rf as a\nempty W as b\nacyclic po as c").unwrap();
        let v = check(&m, &candidates(SB)[0]);
        assert_eq!(v.failed_checks, vec!["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn rebind_matches_fresh_env() {
        let m = parse_cat("let com = rf | co | fr\nacyclic po | com as sc\nempty rf & int as a").unwrap();
        let cands = candidates(SB);
        let mut env = Env::new(&cands[0]);
        for c in &cands {
            env.rebind(c);
            assert_eq!(check_in(&m, &mut env), check(&m, c));
        }
    }

    #[test]
    fn predefined_relations() {
        let c = &candidates(SB)[0];
        let env = Env::new(c);
        // events: IWx IWy | Wx Ry | Wy Rx
        // same location, different thread: 6 ordered pairs per location
        assert_eq!(rel(&env, "loc & ext").len(), 12);
        assert!(rel(&env, "int & ext").is_empty());
        assert_eq!(rel(&env, "int \\ id"), c.po.union(&c.po.inverse()));
        assert_eq!(rel(&env, "[M]").len(), 6);
        assert_eq!(rel(&env, "W*R").len(), 4);
    }
}
