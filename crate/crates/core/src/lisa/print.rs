use std::fmt::Write;

use super::ast::{Instruction, LitmusTest};

/// Renders a test in the canonical litmus layout accepted by
/// [`parse_litmus`](super::parse_litmus). Labels get their own row.
pub fn pretty_print(test: &LitmusTest) -> String {
    let mut out = String::new();
    writeln!(out, "LISA {}", test.name).unwrap();
    for m in &test.metadata {
        writeln!(out, "{m}").unwrap();
    }
    out.push('{');
    for (loc, v) in &test.prelude {
        write!(out, " {loc} = {v};").unwrap();
    }
    out.push_str(" }\n");

    let columns: Vec<Vec<String>> = test
        .processes
        .iter()
        .map(|p| {
            std::iter::once(format!("P{}", p.id))
                .chain(p.code.iter().map(Instruction::to_string))
                .collect()
        })
        .collect();
    let height = columns.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = columns
        .iter()
        .map(|c| c.iter().map(String::len).max().unwrap_or(0))
        .collect();
    for row in 0..height {
        let cells: Vec<String> = columns
            .iter()
            .zip(&widths)
            .map(|(col, w)| format!(" {:<w$} ", col.get(row).map(String::as_str).unwrap_or("")))
            .collect();
        writeln!(out, "{};", cells.join("|")).unwrap();
    }
    writeln!(out, "{}", test.final_cond).unwrap();
    out
}
