//! Sparse linear programs with appendable rows and a bundled simplex engine.

mod export;
mod factor;
mod simplex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use export::write_lp;
pub use simplex::SimplexEngine;

/// Primal feasibility tolerance on rows and bounds.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Reduced-cost tolerance for optimality.
pub const OPTIMALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub lower: f64,
    pub upper: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub coefficients: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Row {
    pub fn new(coefficients: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> Self {
        Row {
            coefficients,
            relation,
            rhs,
        }
    }

    pub fn activity(&self, values: &[f64]) -> f64 {
        self.coefficients.iter().map(|&(j, a)| a * values[j]).sum()
    }

    /// Amount by which `values` violate the row; zero or negative when satisfied.
    pub fn violation(&self, values: &[f64]) -> f64 {
        let act = self.activity(values);
        match self.relation {
            Relation::Le => act - self.rhs,
            Relation::Ge => self.rhs - act,
            Relation::Eq => (act - self.rhs).abs(),
        }
    }

    /// Bounds `[lo, hi]` on the row activity.
    pub(crate) fn range(&self) -> (f64, f64) {
        match self.relation {
            Relation::Le => (f64::NEG_INFINITY, self.rhs),
            Relation::Ge => (self.rhs, f64::INFINITY),
            Relation::Eq => (self.rhs, self.rhs),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("column {0} has lower bound above upper bound")]
    InvertedBounds(usize),
    #[error("row {row} references column {col} which does not exist")]
    ColumnOutOfRange { row: usize, col: usize },
    #[error("non-finite coefficient in {0}")]
    NonFinite(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("simplex made no progress after {0} iterations")]
    IterationLimit(usize),
    #[error("basis could not be factored after repair")]
    SingularBasis,
}

/// A linear program in maximization form.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LpModel {
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
}

impl LpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_column(&mut self, lower: f64, upper: f64, objective: f64) -> usize {
        self.columns.push(Column {
            lower,
            upper,
            objective,
        });
        self.columns.len() - 1
    }

    pub fn add_row(&mut self, row: Row) -> usize {
        self.rows.push(row);
        self.rows.len() - 1
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.columns.iter().zip(values).map(|(c, v)| c.objective * v).sum()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (j, c) in self.columns.iter().enumerate() {
            if c.lower.is_nan() || c.upper.is_nan() || !c.objective.is_finite() {
                return Err(ModelError::NonFinite(format!("column {j}")));
            }
            if c.lower > c.upper {
                return Err(ModelError::InvertedBounds(j));
            }
        }
        for (i, r) in self.rows.iter().enumerate() {
            if !r.rhs.is_finite() {
                return Err(ModelError::NonFinite(format!("row {i}")));
            }
            for &(j, a) in &r.coefficients {
                if j >= self.columns.len() {
                    return Err(ModelError::ColumnOutOfRange { row: i, col: j });
                }
                if !a.is_finite() {
                    return Err(ModelError::NonFinite(format!("row {i}")));
                }
            }
        }
        Ok(())
    }

    /// Largest violation of any row or column bound by `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| r.violation(values));
        let cols = self
            .columns
            .iter()
            .zip(values)
            .map(|(c, &v)| (c.lower - v).max(v - c.upper));
        rows.chain(cols).fold(0.0, f64::max)
    }
}

/// Return `model` with `rows` appended. A basis of `model` stays a valid warm start.
pub fn append_rows(mut model: LpModel, rows: impl IntoIterator<Item = Row>) -> LpModel {
    model.rows.extend(rows);
    model
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisStatus {
    Basic,
    AtLower,
    AtUpper,
    Free,
}

/// Basis statuses for structural columns followed by row logicals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis {
    pub columns: Vec<BasisStatus>,
    pub rows: Vec<BasisStatus>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub primal: Vec<f64>,
    pub row_activity: Vec<f64>,
    pub basis: Basis,
}

/// Solve `model` from scratch, or from `warm_start` when given.
pub fn solve(model: &LpModel, warm_start: Option<&Basis>) -> Result<LpSolution, LpError> {
    let mut engine = SimplexEngine::new(model);
    if let Some(b) = warm_start {
        engine.set_basis(b);
    }
    engine.solve()?;
    Ok(engine.solution())
}

/// The operations the solver layer needs from an LP backend.
pub trait LpEngine {
    fn num_columns(&self) -> usize;
    fn num_rows(&self) -> usize;
    fn add_rows(&mut self, rows: &[Row]);
    fn set_bounds(&mut self, col: usize, lower: f64, upper: f64);
    fn bounds(&self, col: usize) -> (f64, f64);
    fn solve(&mut self) -> Result<LpStatus, LpError>;
    fn objective(&self) -> f64;
    fn primal(&self) -> &[f64];
}

impl LpEngine for SimplexEngine {
    fn num_columns(&self) -> usize {
        SimplexEngine::num_columns(self)
    }
    fn num_rows(&self) -> usize {
        SimplexEngine::num_rows(self)
    }
    fn add_rows(&mut self, rows: &[Row]) {
        SimplexEngine::add_rows(self, rows)
    }
    fn set_bounds(&mut self, col: usize, lower: f64, upper: f64) {
        SimplexEngine::set_bounds(self, col, lower, upper)
    }
    fn bounds(&self, col: usize) -> (f64, f64) {
        SimplexEngine::bounds(self, col)
    }
    fn solve(&mut self) -> Result<LpStatus, LpError> {
        SimplexEngine::solve(self)
    }
    fn objective(&self) -> f64 {
        SimplexEngine::objective(self)
    }
    fn primal(&self) -> &[f64] {
        SimplexEngine::primal(self)
    }
}
