use super::{SolverConfig, SolverError, POOL_TOL};
use crate::formulation::FormulationHandle;
use crate::instance::StopInstance;
use crate::lp::{LpStatus, Row, SimplexEngine};
use crate::separation::{filter_cuts, separate_cc, separate_gcc, separate_lci, ConflictSet, Cut, SupportPoint, VIOLATION_EPS};
use std::time::Instant;

/// Rows held outside the LP and moved in once violated. Moved rows stay in.
#[derive(Debug, Clone)]
pub struct Pool {
    rows: Vec<Row>,
    active: Vec<bool>,
}

impl Pool {
    pub fn new(rows: Vec<Row>) -> Self {
        let active = vec![false; rows.len()];
        Pool { rows, active }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn max_violation(&self, primal: &[f64]) -> f64 {
        self.rows.iter().map(|r| r.violation(primal)).fold(0.0, f64::max)
    }

    /// Re-solve until the optimum violates no pool row.
    pub fn solve(&mut self, engine: &mut SimplexEngine) -> Result<LpStatus, SolverError> {
        loop {
            match engine.solve()? {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => return Ok(LpStatus::Infeasible),
                LpStatus::Unbounded => return Err(SolverError::Unbounded),
            }
            let primal = engine.primal();
            let violated: Vec<usize> = (0..self.rows.len())
                .filter(|&k| !self.active[k] && self.rows[k].violation(primal) > POOL_TOL)
                .collect();
            if violated.is_empty() {
                return Ok(LpStatus::Optimal);
            }
            let rows: Vec<Row> = violated.iter().map(|&k| self.rows[k].clone()).collect();
            engine.add_rows(&rows);
            violated.iter().for_each(|&k| self.active[k] = true);
        }
    }
}

pub struct RootOutcome {
    pub engine: SimplexEngine,
    pub pool: Pool,
    pub handle: FormulationHandle,
    /// Relaxation value before any cut; `None` when it is infeasible.
    pub lp_bound: Option<f64>,
    /// Value after the last round; `None` when the cuts proved infeasibility.
    pub bound: Option<f64>,
    pub rounds: usize,
    pub cuts: Vec<Cut>,
}

/// Separate, append and re-solve until a round finds no cut or improves the
/// bound by at most `config.root_tolerance`.
pub(super) fn cutting_plane_phase(
    inst: &StopInstance,
    handle: FormulationHandle,
    conflicts: &ConflictSet,
    config: &SolverConfig,
    deadline: Instant,
) -> Result<RootOutcome, SolverError> {
    let mut engine = SimplexEngine::new(&handle.model);
    let mut pool = Pool::new(handle.soft_rows.clone());
    let mut cuts = Vec::new();
    let mut rounds = 0;
    if pool.solve(&mut engine)? == LpStatus::Infeasible {
        return Ok(RootOutcome {
            engine,
            pool,
            handle,
            lp_bound: None,
            bound: None,
            rounds,
            cuts,
        });
    }
    let lp_bound = engine.objective();
    let mut bound = Some(lp_bound);
    let families = config.families;
    while let Some(current) = bound {
        if Instant::now() >= deadline {
            break;
        }
        let point = SupportPoint::from_primal(&handle, engine.primal());
        let mut found = Vec::new();
        if families.gcc {
            found.extend(filter_cuts(separate_gcc(inst, &point, &config.gcc), &config.gcc, &point));
        }
        if families.cc {
            found.extend(filter_cuts(separate_cc(inst, &point, conflicts, &config.cc), &config.cc, &point));
        }
        if families.lci {
            // The current optimum bounds every solution, so it serves as the knapsack capacity.
            let cover = separate_lci(inst, &point, current, config.lifting);
            found.extend(cover.filter(|c| c.violation(&point) > config.lci.abs_violation + VIOLATION_EPS));
        }
        if found.is_empty() {
            break;
        }
        let rows: Vec<Row> = found.iter().map(|c| c.to_row(&handle)).collect();
        engine.add_rows(&rows);
        cuts.extend(found);
        rounds += 1;
        // Valid cuts that empty the relaxation prove there is no route set.
        if pool.solve(&mut engine)? == LpStatus::Infeasible {
            bound = None;
            break;
        }
        let value = engine.objective().min(current);
        bound = Some(value);
        if current - value <= config.root_tolerance {
            break;
        }
    }
    Ok(RootOutcome {
        engine,
        pool,
        handle,
        lp_bound: Some(lp_bound),
        bound,
        rounds,
        cuts,
    })
}
