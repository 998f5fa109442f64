//! Batch solving with per-set aggregates, in CSV and aligned text.
//!
//! Rows are sorted by instance name before anything is aggregated, so the
//! output does not depend on how many worker threads ran the solves. Wall
//! times are the only nondeterministic field; CSV carries them only on request.

use crate::instance::StopInstance;
use crate::solver::{solve, CutCounts, Mode, SolveStatus, SolverConfig};
use serde::Serialize;
use std::fmt::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub set: String,
    pub instance: StopInstance,
}

impl BenchInstance {
    /// Set id taken from the name: everything before the first dot
    /// (`p4.3.o` belongs to `p4`), or the whole name when there is none.
    pub fn from_name(instance: StopInstance) -> Self {
        let set = instance.name().split('.').next().unwrap_or_default().to_string();
        BenchInstance { set, instance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub set: String,
    pub mode: Mode,
    /// `None` when the solve failed; the message is in `error`.
    pub status: Option<SolveStatus>,
    pub lower_bound: Option<u64>,
    pub upper_bound: Option<f64>,
    pub lp_bound: Option<f64>,
    /// `100 · gap`: zero once solved or proven infeasible, 100 without any route set.
    pub gap_pct: f64,
    pub wall_time: f64,
    pub cuts: CutCounts,
    pub nodes: u64,
    pub error: Option<String>,
}

impl BenchRow {
    pub fn solved(&self) -> bool {
        matches!(self.status, Some(SolveStatus::Optimal | SolveStatus::Infeasible))
    }

    /// Dual bound improvement over the root relaxation, in percent.
    pub fn improvement(&self) -> Option<f64> {
        improvement(self.lp_bound?, self.upper_bound?)
    }
}

/// `100 · (lp − ub) / lp`; undefined for a zero relaxation value.
pub fn improvement(lp: f64, ub: f64) -> Option<f64> {
    (lp.abs() > 1e-12).then(|| 100.0 * (lp - ub) / lp)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetSummary {
    pub set: String,
    /// Solved to optimality or proven infeasible.
    pub solved: usize,
    pub total: usize,
    pub avg_time_solved: Option<f64>,
    pub avg_gap_unsolved: Option<f64>,
    /// Population standard deviation.
    pub stdev_gap_unsolved: Option<f64>,
    pub avg_improvement: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
    pub sets: Vec<SetSummary>,
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn stdev(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    Some((values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt())
}

/// Per-set footers, sets in name order.
pub fn summarize(rows: &[BenchRow]) -> Vec<SetSummary> {
    let mut sets: Vec<&str> = rows.iter().map(|r| r.set.as_str()).collect();
    sets.sort_unstable();
    sets.dedup();
    sets.into_iter()
        .map(|set| {
            let members: Vec<&BenchRow> = rows.iter().filter(|r| r.set == set).collect();
            let times: Vec<f64> = members.iter().filter(|r| r.solved()).map(|r| r.wall_time).collect();
            let gaps: Vec<f64> = members.iter().filter(|r| !r.solved()).map(|r| r.gap_pct).collect();
            let gains: Vec<f64> = members.iter().filter_map(|r| r.improvement()).collect();
            SetSummary {
                set: set.to_string(),
                solved: times.len(),
                total: members.len(),
                avg_time_solved: mean(&times),
                avg_gap_unsolved: mean(&gaps),
                stdev_gap_unsolved: stdev(&gaps),
                avg_improvement: mean(&gains),
            }
        })
        .collect()
}

fn run_one(item: &BenchInstance, mode: Mode, config: &SolverConfig) -> BenchRow {
    let started = Instant::now();
    let result = solve(&item.instance, mode, config);
    let wall_time = started.elapsed().as_secs_f64();
    let mut row = BenchRow {
        instance: item.instance.name().to_string(),
        set: item.set.clone(),
        mode,
        status: None,
        lower_bound: None,
        upper_bound: None,
        lp_bound: None,
        gap_pct: 100.0,
        wall_time,
        cuts: CutCounts::default(),
        nodes: 0,
        error: None,
    };
    match result {
        Ok(r) => {
            row.gap_pct = 100.0 * r.gap();
            row.status = Some(r.status);
            row.lower_bound = r.lower_bound;
            row.upper_bound = r.upper_bound;
            row.lp_bound = r.lp_bound;
            row.cuts = r.cuts;
            row.nodes = r.nodes;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Solve every instance with `jobs` worker threads. A failed solve becomes
/// a row with its error message.
pub fn run_bench(instances: &[BenchInstance], mode: Mode, config: &SolverConfig, jobs: usize) -> BenchTable {
    let next = AtomicUsize::new(0);
    let rows = Mutex::new(Vec::with_capacity(instances.len()));
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, instances.len().max(1)) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = instances.get(k) else { break };
                let row = run_one(item, mode, config);
                rows.lock().expect("no worker panics while holding the lock").push(row);
            });
        }
    });
    let mut rows = rows.into_inner().expect("workers finished");
    rows.sort_by(|a, b| a.instance.cmp(&b.instance).then(a.set.cmp(&b.set)));
    let sets = summarize(&rows);
    BenchTable { rows, sets }
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

fn fixed(v: Option<f64>, digits: usize) -> String {
    v.map_or(String::new(), |v| format!("{v:.digits$}"))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl BenchTable {
    /// Rows, then one `#set` line per set. Gaps are percentages; proven
    /// infeasible rows have gap 0 and rows without any route set gap 100.
    pub fn to_csv(&self, with_timing: bool) -> String {
        let mut out = String::from("instance,set,mode,status,lb,ub,lp,gap_pct,gcc,cc,lci,nodes,error");
        if with_timing {
            out.push_str(",time_s");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(
                out,
                "{},{},{},{},{},{},{},{:.4},{},{},{},{},{}",
                csv_field(&r.instance),
                csv_field(&r.set),
                r.mode,
                opt(r.status),
                opt(r.lower_bound),
                fixed(r.upper_bound, 6),
                fixed(r.lp_bound, 6),
                r.gap_pct,
                r.cuts.gcc,
                r.cuts.cc,
                r.cuts.lci,
                r.nodes,
                csv_field(r.error.as_deref().unwrap_or("")),
            );
            if with_timing {
                let _ = write!(out, ",{:.3}", r.wall_time);
            }
            out.push('\n');
        }
        out.push_str("#set,solved,total,avg_gap_unsolved,stdev_gap_unsolved,avg_improvement_pct");
        if with_timing {
            out.push_str(",avg_time_solved");
        }
        out.push('\n');
        for s in &self.sets {
            let _ = write!(
                out,
                "#{},{},{},{},{},{}",
                csv_field(&s.set),
                s.solved,
                s.total,
                fixed(s.avg_gap_unsolved, 4),
                fixed(s.stdev_gap_unsolved, 4),
                fixed(s.avg_improvement, 4),
            );
            if with_timing {
                let _ = write!(out, ",{}", fixed(s.avg_time_solved, 3));
            }
            out.push('\n');
        }
        out
    }

    /// Aligned table for reading in a terminal, with times.
    pub fn to_text(&self) -> String {
        let header = ["instance", "set", "mode", "status", "LB", "UB", "LP", "gap%", "cuts", "nodes", "time s"];
        let mut lines: Vec<Vec<String>> = vec![header.iter().map(|h| h.to_string()).collect()];
        for r in &self.rows {
            lines.push(vec![
                r.instance.clone(),
                r.set.clone(),
                r.mode.to_string(),
                r.status.map_or_else(|| "error".to_string(), |s| s.to_string()),
                opt(r.lower_bound),
                fixed(r.upper_bound, 2),
                fixed(r.lp_bound, 2),
                format!("{:.2}", r.gap_pct),
                r.cuts.total().to_string(),
                r.nodes.to_string(),
                format!("{:.2}", r.wall_time),
            ]);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| lines.iter().map(|l| l[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for line in &lines {
            let cells: Vec<String> = line.iter().zip(&widths).map(|(cell, &w)| format!("{cell:<w$}")).collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        for r in self.rows.iter().filter(|r| r.error.is_some()) {
            let _ = writeln!(out, "error on {}: {}", r.instance, r.error.as_deref().unwrap_or_default());
        }
        for s in &self.sets {
            let _ = writeln!(
                out,
                "set {}: {}/{} solved, avg time {} s, unsolved gap {} ± {} %, bound improvement {} %",
                s.set,
                s.solved,
                s.total,
                fixed(s.avg_time_solved, 2),
                fixed(s.avg_gap_unsolved, 2),
                fixed(s.stdev_gap_unsolved, 2),
                fixed(s.avg_improvement, 2),
            );
        }
        out
    }
}
