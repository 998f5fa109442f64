//! CPLEX LP text format, for inspecting models by eye.

use super::{LpModel, Relation};
use std::fmt::Write;

fn term(out: &mut String, coef: f64, col: usize, first: bool) {
    let sign = if coef < 0.0 { "-" } else if first { "" } else { "+" };
    let _ = write!(out, " {sign} {} c{col}", coef.abs());
}

/// Render `model` in CPLEX LP format. Columns are named `c<index>`, rows `r<index>`.
pub fn write_lp(model: &LpModel) -> String {
    let mut out = String::from("Maximize\n obj:");
    let mut first = true;
    for (j, c) in model.columns.iter().enumerate() {
        if c.objective != 0.0 {
            term(&mut out, c.objective, j, first);
            first = false;
        }
    }
    if first {
        out.push_str(" 0 c0");
    }
    out.push_str("\nSubject To\n");
    for (i, row) in model.rows.iter().enumerate() {
        let _ = write!(out, " r{i}:");
        for (k, &(j, a)) in row.coefficients.iter().enumerate() {
            term(&mut out, a, j, k == 0);
        }
        if row.coefficients.is_empty() {
            out.push_str(" 0 c0");
        }
        let rel = match row.relation {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        };
        let _ = writeln!(out, " {rel} {}", row.rhs);
    }
    out.push_str("Bounds\n");
    for (j, c) in model.columns.iter().enumerate() {
        let lo = if c.lower == f64::NEG_INFINITY { "-inf".to_string() } else { c.lower.to_string() };
        let hi = if c.upper == f64::INFINITY { "+inf".to_string() } else { c.upper.to_string() };
        let _ = writeln!(out, " {lo} <= c{j} <= {hi}");
    }
    out.push_str("End\n");
    out
}
