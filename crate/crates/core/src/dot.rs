//! Graphviz rendering of candidate executions.

use std::fmt::Write;

use crate::execution::CandidateExecution;
use crate::relation::Relation;

/// Immediate successors only, so po chains do not draw every transitive pair.
fn reduce(r: &Relation) -> Relation {
    r.difference(&r.compose(&r.transitive_closure()))
}

/// A DOT digraph with one node per event and edges for po, rf, co and fr.
/// Processes are grouped in clusters; initial writes sit outside them.
pub fn to_dot(name: &str, c: &CandidateExecution) -> String {
    let mut s = String::new();
    writeln!(s, "digraph \"{}\" {{", name.replace('"', "\\\"")).unwrap();
    writeln!(s, "  node [shape=box, fontname=\"monospace\"];").unwrap();
    let procs: Vec<usize> = {
        let mut p: Vec<usize> = c.events.iter().filter_map(|e| e.proc).collect();
        p.dedup();
        p
    };
    for e in c.events.iter().filter(|e| e.proc.is_none()) {
        writeln!(s, "  e{} [label=\"{}\"];", e.id, e).unwrap();
    }
    for p in procs {
        writeln!(s, "  subgraph cluster_p{p} {{").unwrap();
        writeln!(s, "    label=\"P{p}\";").unwrap();
        for e in c.events.iter().filter(|e| e.proc == Some(p)) {
            writeln!(s, "    e{} [label=\"{}\"];", e.id, e).unwrap();
        }
        writeln!(s, "  }}").unwrap();
    }
    let edges = [
        ("po", reduce(&c.po), "black"),
        ("rf", c.rf.clone(), "red"),
        ("co", reduce(&c.co), "blue"),
        ("fr", c.fr(), "orange"),
    ];
    for (label, rel, colour) in edges {
        for (a, b) in rel.pairs() {
            writeln!(
                s,
                "  e{a} -> e{b} [label=\"{label}\", color={colour}, fontcolor={colour}];"
            )
            .unwrap();
        }
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anarchic::{candidate_executions, EnumConfig};
    use crate::lisa::load_litmus;

    #[test]
    fn mp_graph_has_expected_edges() {
        let t = load_litmus(
            "LISA MP\n{}\nP0 | P1 ;\nw[] x 1 | r[] r1 y ;\nw[] y 1 | r[] r2 x ;\nexists (1:r1=1 /\\ 1:r2=0)\n",
        )
        .unwrap();
        let mut first = None;
        candidate_executions(&t, &EnumConfig::default(), |c| {
            first.get_or_insert_with(|| c.clone());
        })
        .unwrap();
        let g = to_dot("MP", &first.unwrap());
        assert!(g.starts_with("digraph \"MP\" {"));
        assert_eq!(g.matches("label=\"po\"").count(), 2);
        assert_eq!(g.matches("label=\"rf\"").count(), 2);
        assert!(g.contains("subgraph cluster_p1"));
        assert!(g.contains("init IW x=0"));
    }
}
