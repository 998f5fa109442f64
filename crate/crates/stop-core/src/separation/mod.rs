//! Valid inequalities and their separation against fractional points.
//!
//! Three families are handled: connectivity cuts (every visited vertex must
//! be linked to the destination), conflict cuts (two vertices that no single
//! route can both visit need two units of flow across any set holding them)
//! and lifted cover inequalities on the reward knapsack.

mod cc;
mod conflict;
mod filter;
mod gcc;
mod knapsack;
mod lci;

use crate::formulation::FormulationHandle;
use crate::instance::StopInstance;
use crate::lp::{Relation, Row};
use crate::maxflow::FlowNetwork;
use serde::Serialize;

pub use cc::separate_cc;
pub use conflict::ConflictSet;
pub use filter::{filter_cuts, FilterParams};
pub use gcc::separate_gcc;
pub use knapsack::{knapsack_max, KnapsackError};
pub use lci::{separate_lci, Lifting, LciSummary};

/// Arc values at or below this count as zero when building support graphs.
pub const SUPPORT_TOL: f64 = 1e-9;
/// Guard added to violation thresholds so that ties are not emitted.
pub const VIOLATION_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CutFamily {
    Gcc,
    Cc,
    Lci,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CutSide {
    /// Arcs entering the set; the origin lies outside it.
    Enter,
    /// Arcs leaving the set; the destination lies outside it.
    Leave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Term {
    Arc(usize, usize),
    Visit(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Provenance {
    Gcc { set: Vec<usize>, vertex: usize },
    Cc { set: Vec<usize>, pair: (usize, usize), side: CutSide },
    Lci(LciSummary),
}

/// One inequality `Σ coef · term (≥ | ≤) rhs` over arc and visit variables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cut {
    pub family: CutFamily,
    pub terms: Vec<(Term, f64)>,
    pub relation: Relation,
    pub rhs: f64,
    pub provenance: Provenance,
}

impl Cut {
    pub fn lhs(&self, value: impl Fn(Term) -> f64) -> f64 {
        self.terms.iter().map(|&(t, c)| c * value(t)).sum()
    }

    /// Positive when `point` violates the cut.
    pub fn violation(&self, point: &SupportPoint) -> f64 {
        let lhs = self.lhs(|t| point.value(t));
        match self.relation {
            Relation::Ge => self.rhs - lhs,
            Relation::Le => lhs - self.rhs,
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }

    /// Coefficients oriented so that the cut reads `a · w ≤ b`.
    fn oriented(&self) -> impl Iterator<Item = (Term, f64)> + '_ {
        let sign = if self.relation == Relation::Ge { -1.0 } else { 1.0 };
        self.terms.iter().map(move |&(t, c)| (t, sign * c))
    }

    pub fn norm(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c * c).sum::<f64>().sqrt()
    }

    /// Euclidean distance from `point` to the cut hyperplane, signed positive when violated.
    pub fn distance(&self, point: &SupportPoint) -> f64 {
        self.violation(point) / self.norm()
    }

    /// Cosine of the angle between the two cut normals.
    pub fn parallelism(&self, other: &Cut) -> f64 {
        let mut a: Vec<(Term, f64)> = self.oriented().collect();
        let mut b: Vec<(Term, f64)> = other.oriented().collect();
        a.sort_by_key(|e| e.0);
        b.sort_by_key(|e| e.0);
        let (mut i, mut j, mut dot) = (0, 0, 0.0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    dot += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        dot / (self.norm() * other.norm())
    }

    /// The cut as a model row. Terms on arcs absent from the model are dropped.
    pub fn to_row(&self, h: &FormulationHandle) -> Row {
        let mut coefficients: Vec<(usize, f64)> = self
            .terms
            .iter()
            .filter_map(|&(t, c)| match t {
                Term::Arc(i, j) => h.x_col(i, j).map(|col| (col, c)),
                Term::Visit(v) => Some((h.y_col(v), c)),
            })
            .collect();
        coefficients.sort_by_key(|e| e.0);
        Row::new(coefficients, self.relation, self.rhs)
    }

    /// The same cut with every vertex renamed through `ids`.
    pub fn relabeled(&self, ids: &[usize]) -> Cut {
        let mut cut = self.clone();
        for (t, _) in cut.terms.iter_mut() {
            *t = match *t {
                Term::Arc(i, j) => Term::Arc(ids[i], ids[j]),
                Term::Visit(v) => Term::Visit(ids[v]),
            };
        }
        cut
    }
}

/// Arc and visit values of a point, indexed by vertex ids.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportPoint {
    n: usize,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl SupportPoint {
    pub fn new(n: usize) -> Self {
        SupportPoint {
            n,
            x: vec![0.0; n * n],
            y: vec![0.0; n],
        }
    }

    pub fn from_primal(h: &FormulationHandle, primal: &[f64]) -> Self {
        let n = h.vertex_count();
        let mut p = SupportPoint::new(n);
        for (k, &(i, j)) in h.arcs().iter().enumerate() {
            p.x[i * n + j] = primal[k];
        }
        for v in 0..n {
            p.y[v] = primal[h.y_col(v)];
        }
        p
    }

    pub fn set_arc(&mut self, i: usize, j: usize, v: f64) {
        self.x[i * self.n + j] = v;
    }

    pub fn set_visit(&mut self, v: usize, value: f64) {
        self.y[v] = value;
    }

    pub fn arc(&self, i: usize, j: usize) -> f64 {
        self.x[i * self.n + j]
    }

    pub fn visit(&self, v: usize) -> f64 {
        self.y[v]
    }

    pub fn value(&self, t: Term) -> f64 {
        match t {
            Term::Arc(i, j) => self.arc(i, j),
            Term::Visit(v) => self.visit(v),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Flow network on the arcs with positive value, capacity = arc value,
    /// with `extra` spare nodes after the vertices. `reverse` flips every arc.
    fn network(&self, inst: &StopInstance, extra: usize, reverse: bool) -> FlowNetwork<f64> {
        let mut net = FlowNetwork::new(self.n + extra);
        for (i, j) in inst.arcs() {
            let v = self.arc(i, j);
            if v > SUPPORT_TOL {
                if reverse {
                    net.add_arc(j, i, v);
                } else {
                    net.add_arc(i, j, v);
                }
            }
        }
        net
    }
}

/// Arcs of `inst` leaving `set` (`Leave`) or entering it (`Enter`).
fn crossing_arcs(inst: &StopInstance, inside: &[bool], side: CutSide) -> Vec<(Term, f64)> {
    inst.arcs()
        .filter(|&(i, j)| match side {
            CutSide::Leave => inside[i] && !inside[j],
            CutSide::Enter => !inside[i] && inside[j],
        })
        .map(|(i, j)| (Term::Arc(i, j), 1.0))
        .collect()
}

#[cfg(test)]
mod tests;
