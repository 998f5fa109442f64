//! Arc-flow models of STOP as linear programs.
//!
//! Both models share the routing part on binary arc variables `x`, visit
//! variables `y` and the unused-vehicle count `φ`. They differ in how time is
//! tracked: the elapsed-time model carries `z_ij`, the time at which a vehicle
//! reaches `j` through `(i, j)`; the remaining-time model carries `f_ij`, the
//! time still available when leaving `i` along `(i, j)`. On every arc
//! `f_ij = T·x_ij − z_ij`.
//!
//! Column layout, with `A` the arc list in row-major order and `n = |N|`:
//! `x` at `0..|A|`, `y` at `|A|..|A|+n`, the time columns at `|A|+n..2|A|+n`,
//! and `φ` last.
//!
//! Row order (both models): fixed visits `y_v = 1` for mandatory and terminal
//! vertices; out-degree `Σ x_vj = y_v` per customer; fleet rows at origin and
//! destination; arcs into the origin and out of the destination (only when
//! such arcs exist); flow balance per customer; then the time rows listed on
//! the builders.

use crate::instance::StopInstance;
use crate::lp::{LpModel, Relation, Row};
use crate::paths::MinTimeMatrix;
use serde::Serialize;
use thiserror::Error;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FormulationKind {
    /// Elapsed time on arcs (`z`).
    ElapsedTime,
    /// Remaining time on arcs (`f`).
    RemainingTime,
}

#[derive(Debug, Error, PartialEq)]
pub enum FormulationError {
    #[error("mandatory vertex {0} cannot be visited within the time limit")]
    UnreachableMandatory(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RemainingTimeOptions {
    /// Hold the `f_ij ≥ R_jt·x_ij` rows in `soft_rows` instead of the model.
    pub bounds_as_cuts: bool,
    /// Generate the `f_ij ≥ R_jt·x_ij` rows at all.
    pub include_lower_time_bounds: bool,
}

impl Default for RemainingTimeOptions {
    fn default() -> Self {
        RemainingTimeOptions {
            bounds_as_cuts: false,
            include_lower_time_bounds: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElapsedTimeOptions {
    /// Append `Σ d_ij x_ij ≤ m·T`.
    pub include_total_duration: bool,
    /// Generate the `z_ij ≥ (R_si + d_ij)·x_ij` rows.
    pub include_lower_time_bounds: bool,
}

impl Default for ElapsedTimeOptions {
    fn default() -> Self {
        ElapsedTimeOptions {
            include_total_duration: false,
            include_lower_time_bounds: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FormulationHandle {
    pub model: LpModel,
    pub kind: FormulationKind,
    /// Rows kept out of the model for lazy enforcement.
    pub soft_rows: Vec<Row>,
    n: usize,
    arcs: Vec<(usize, usize)>,
    arc_of: Vec<usize>,
    time_limit: f64,
}

impl FormulationHandle {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn arc_index(&self, i: usize, j: usize) -> Option<usize> {
        let k = self.arc_of[i * self.n + j];
        (k != NONE).then_some(k)
    }

    pub fn x_col(&self, i: usize, j: usize) -> Option<usize> {
        self.arc_index(i, j)
    }

    pub fn y_col(&self, v: usize) -> usize {
        self.arcs.len() + v
    }

    /// Column of `z_ij` or `f_ij`, depending on the model.
    pub fn time_col(&self, i: usize, j: usize) -> Option<usize> {
        self.arc_index(i, j).map(|k| self.arcs.len() + self.n + k)
    }

    pub fn phi_col(&self) -> usize {
        2 * self.arcs.len() + self.n
    }

    /// True for the `x` and `y` columns, which must be integral.
    pub fn is_integer_col(&self, col: usize) -> bool {
        col < self.arcs.len() + self.n
    }

    pub fn time_limit(&self) -> f64 {
        self.time_limit
    }

    pub fn x_values<'a>(&self, primal: &'a [f64]) -> &'a [f64] {
        &primal[..self.arcs.len()]
    }

    pub fn y_values<'a>(&self, primal: &'a [f64]) -> &'a [f64] {
        &primal[self.arcs.len()..self.arcs.len() + self.n]
    }
}

fn check_mandatory(inst: &StopInstance, r: &MinTimeMatrix<f64>) -> Result<(), FormulationError> {
    let (s, t) = (inst.origin(), inst.destination());
    for v in inst.mandatory() {
        if r.get(s, v) + r.get(v, t) > inst.time_limit() {
            return Err(FormulationError::UnreachableMandatory(v));
        }
    }
    Ok(())
}

/// Columns and the routing rows shared by both models.
fn routing_part(inst: &StopInstance, kind: FormulationKind) -> FormulationHandle {
    let n = inst.vertex_count();
    let arcs: Vec<(usize, usize)> = inst.arcs().collect();
    let mut arc_of = vec![NONE; n * n];
    for (k, &(i, j)) in arcs.iter().enumerate() {
        arc_of[i * n + j] = k;
    }
    let tmax = inst.time_limit();
    let mut model = LpModel::new();
    for _ in &arcs {
        model.add_column(0.0, 1.0, 0.0);
    }
    for v in 0..n {
        model.add_column(0.0, 1.0, inst.reward(v) as f64);
    }
    for _ in &arcs {
        model.add_column(0.0, tmax, 0.0);
    }
    model.add_column(0.0, inst.fleet_size() as f64, 0.0);
    let h = FormulationHandle {
        model,
        kind,
        soft_rows: Vec::new(),
        n,
        arcs,
        arc_of,
        time_limit: tmax,
    };
    let mut rows = Vec::new();
    let (s, t) = (inst.origin(), inst.destination());
    let out_arcs = |v: usize| h.arcs.iter().enumerate().filter(move |(_, a)| a.0 == v).map(|(k, _)| k);
    let in_arcs = |v: usize| h.arcs.iter().enumerate().filter(move |(_, a)| a.1 == v).map(|(k, _)| k);

    for v in 0..n {
        if inst.is_terminal(v) || inst.is_mandatory(v) {
            rows.push(Row::new(vec![(h.y_col(v), 1.0)], Relation::Eq, 1.0));
        }
    }
    for v in inst.customers() {
        let mut c: Vec<(usize, f64)> = out_arcs(v).map(|k| (k, 1.0)).collect();
        c.push((h.y_col(v), -1.0));
        rows.push(Row::new(c, Relation::Eq, 0.0));
    }
    let m = inst.fleet_size() as f64;
    let mut c: Vec<(usize, f64)> = out_arcs(s).map(|k| (k, 1.0)).collect();
    c.push((h.phi_col(), 1.0));
    rows.push(Row::new(c, Relation::Eq, m));
    let mut c: Vec<(usize, f64)> = in_arcs(t).map(|k| (k, 1.0)).collect();
    c.push((h.phi_col(), 1.0));
    rows.push(Row::new(c, Relation::Eq, m));
    for c in [
        in_arcs(s).map(|k| (k, 1.0)).collect::<Vec<_>>(),
        out_arcs(t).map(|k| (k, 1.0)).collect(),
    ] {
        if !c.is_empty() {
            rows.push(Row::new(c, Relation::Eq, 0.0));
        }
    }
    for v in inst.customers() {
        let mut c: Vec<(usize, f64)> = out_arcs(v).map(|k| (k, 1.0)).collect();
        c.extend(in_arcs(v).map(|k| (k, -1.0)));
        rows.push(Row::new(c, Relation::Eq, 0.0));
    }
    let mut h = h;
    for r in rows {
        h.model.add_row(r);
    }
    h
}

/// Remaining-time model. After the routing rows come, in order:
/// `f_sj = (T − d_sj)·x_sj` per origin arc; per customer
/// `Σ_in f − Σ_out f = Σ_out d·x`; `f_ij ≤ (T − R_si − d_ij)·x_ij` per arc
/// not leaving the origin; and `f_ij ≥ R_jt·x_ij` per arc.
pub fn build_remaining_time(
    inst: &StopInstance,
    options: RemainingTimeOptions,
) -> Result<FormulationHandle, FormulationError> {
    let r = inst.min_time_matrix();
    check_mandatory(inst, &r)?;
    let mut h = routing_part(inst, FormulationKind::RemainingTime);
    let (s, t, tmax) = (inst.origin(), inst.destination(), inst.time_limit());
    let arcs = h.arcs.clone();
    let f = |k: usize| arcs.len() + h.n + k;
    for (k, &(i, j)) in arcs.iter().enumerate() {
        if i == s {
            let d = inst.travel_time(i, j);
            h.model.add_row(Row::new(vec![(f(k), 1.0), (k, -(tmax - d))], Relation::Eq, 0.0));
        }
    }
    for v in inst.customers() {
        let mut c = Vec::new();
        for (k, &(i, j)) in arcs.iter().enumerate() {
            if j == v {
                c.push((f(k), 1.0));
            }
            if i == v {
                c.push((f(k), -1.0));
                c.push((k, -inst.travel_time(i, j)));
            }
        }
        h.model.add_row(Row::new(c, Relation::Eq, 0.0));
    }
    for (k, &(i, j)) in arcs.iter().enumerate() {
        if i != s {
            let cap = tmax - r.get(s, i) - inst.travel_time(i, j);
            h.model.add_row(Row::new(vec![(f(k), 1.0), (k, -cap)], Relation::Le, 0.0));
        }
    }
    if options.include_lower_time_bounds {
        for (k, &(_, j)) in arcs.iter().enumerate() {
            let row = Row::new(vec![(f(k), 1.0), (k, -r.get(j, t))], Relation::Ge, 0.0);
            if options.bounds_as_cuts {
                h.soft_rows.push(row);
            } else {
                h.model.add_row(row);
            }
        }
    }
    Ok(h)
}

/// Elapsed-time model. After the routing rows come, in order:
/// `z_sj = d_sj·x_sj` per origin arc; per customer
/// `Σ_out z − Σ_in z = Σ_out d·x`; `z_ij ≤ (T − R_jt)·x_ij` per arc;
/// `z_ij ≥ (R_si + d_ij)·x_ij` per arc; and optionally `Σ d·x ≤ m·T`.
pub fn build_elapsed_time(
    inst: &StopInstance,
    options: ElapsedTimeOptions,
) -> Result<FormulationHandle, FormulationError> {
    let r = inst.min_time_matrix();
    check_mandatory(inst, &r)?;
    let mut h = routing_part(inst, FormulationKind::ElapsedTime);
    let (s, t, tmax) = (inst.origin(), inst.destination(), inst.time_limit());
    let arcs = h.arcs.clone();
    let z = |k: usize| arcs.len() + h.n + k;
    for (k, &(i, j)) in arcs.iter().enumerate() {
        if i == s {
            let d = inst.travel_time(i, j);
            h.model.add_row(Row::new(vec![(z(k), 1.0), (k, -d)], Relation::Eq, 0.0));
        }
    }
    for v in inst.customers() {
        let mut c = Vec::new();
        for (k, &(i, j)) in arcs.iter().enumerate() {
            if i == v {
                c.push((z(k), 1.0));
                c.push((k, -inst.travel_time(i, j)));
            }
            if j == v {
                c.push((z(k), -1.0));
            }
        }
        h.model.add_row(Row::new(c, Relation::Eq, 0.0));
    }
    for (k, &(_, j)) in arcs.iter().enumerate() {
        let cap = tmax - r.get(j, t);
        h.model.add_row(Row::new(vec![(z(k), 1.0), (k, -cap)], Relation::Le, 0.0));
    }
    if options.include_lower_time_bounds {
        for (k, &(i, j)) in arcs.iter().enumerate() {
            let floor = r.get(s, i) + inst.travel_time(i, j);
            h.model.add_row(Row::new(vec![(z(k), 1.0), (k, -floor)], Relation::Ge, 0.0));
        }
    }
    if options.include_total_duration {
        let c = arcs.iter().enumerate().map(|(k, &(i, j))| (k, inst.travel_time(i, j))).collect();
        h.model.add_row(Row::new(c, Relation::Le, inst.fleet_size() as f64 * tmax));
    }
    Ok(h)
}

/// Routing rows: `|S| + 2` fixed visits, `n − 2` degree rows, two fleet rows,
/// up to two terminal-arc rows and `n − 2` balance rows.
fn routing_row_count(inst: &StopInstance) -> usize {
    let n = inst.vertex_count();
    let (s, t) = (inst.origin(), inst.destination());
    let into_s = (0..n).any(|v| inst.has_arc(v, s));
    let out_of_t = (0..n).any(|v| inst.has_arc(t, v));
    inst.mandatory().len() + 2 + 2 * (n - 2) + 2 + into_s as usize + out_of_t as usize
}

/// Closed-form row count of the remaining-time model with all rows hard:
/// routing rows + `|δ⁺(s)|` + `(n − 2)` + `(|A| − |δ⁺(s)|)` + `|A|`.
pub fn remaining_time_row_count(inst: &StopInstance, options: RemainingTimeOptions) -> usize {
    let a = inst.arc_count();
    let lower = if options.include_lower_time_bounds && !options.bounds_as_cuts { a } else { 0 };
    routing_row_count(inst) + (inst.vertex_count() - 2) + a + lower
}

/// Closed-form row count of the elapsed-time model:
/// routing rows + `|δ⁺(s)|` + `(n − 2)` + `|A|` + `|A|` + optional total-duration row.
pub fn elapsed_time_row_count(inst: &StopInstance, options: ElapsedTimeOptions) -> usize {
    let a = inst.arc_count();
    let s_out = (0..inst.vertex_count()).filter(|&v| inst.has_arc(inst.origin(), v)).count();
    let lower = if options.include_lower_time_bounds { a } else { 0 };
    routing_row_count(inst) + s_out + (inst.vertex_count() - 2) + a + lower + options.include_total_duration as usize
}

/// Map a point of the elapsed-time model to the remaining-time model
/// (`f = T·x − z`); the map is its own inverse.
pub fn map_solution(h: &FormulationHandle, primal: &[f64]) -> Vec<f64> {
    let mut out = primal.to_vec();
    for k in 0..h.arcs.len() {
        let t = h.arcs.len() + h.n + k;
        out[t] = h.time_limit * primal[k] - primal[t];
    }
    out
}

#[cfg(test)]
mod tests;
