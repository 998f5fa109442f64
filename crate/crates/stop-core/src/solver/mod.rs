//! Exact solution pipelines.
//!
//! The cutting-plane pipeline preprocesses the instance, strengthens the root
//! relaxation of the remaining-time model with connectivity, conflict and
//! cover cuts, then closes integrality by branch-and-bound. The baseline
//! instead solves the elapsed-time model and separates connectivity cuts at
//! every node.

mod bnb;
mod heuristic;
mod root;

use crate::formulation::{build_elapsed_time, build_remaining_time, ElapsedTimeOptions, RemainingTimeOptions};
use crate::instance::{preprocess, StopInstance};
use crate::lp::{LpError, LpStatus, SimplexEngine};
use crate::routes::validate_routes;
use crate::separation::{ConflictSet, Cut, CutFamily, FilterParams, Lifting};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};
use thiserror::Error;

pub use bnb::BranchOutcome;
pub use root::{Pool, RootOutcome};

/// Integrality tolerance on arc and visit variables.
pub const INTEGER_TOL: f64 = 1e-6;
/// Pool rows violated by more than this are moved into the LP.
pub const POOL_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("LP engine failed: {0}")]
    Lp(#[from] LpError),
    #[error("relaxation is unbounded, which a well-formed model never is")]
    Unbounded,
    #[error("integer point does not decode into valid routes: {0}")]
    BadIncumbent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Cutting-plane phase, then branch-and-bound.
    Cpa,
    /// Elapsed-time model with connectivity cuts at every node.
    Baseline,
    /// Root relaxation of the remaining-time model only.
    Lp,
    /// Root cutting-plane phase with a subset of the cut families, no branching.
    Config1,
    Config2,
    Config3,
    Config4,
    Config5,
}

impl Mode {
    pub const ALL: [Mode; 8] = [
        Mode::Cpa,
        Mode::Baseline,
        Mode::Lp,
        Mode::Config1,
        Mode::Config2,
        Mode::Config3,
        Mode::Config4,
        Mode::Config5,
    ];

    /// Families used by the root-only configurations.
    pub fn families(self) -> Option<Families> {
        let (gcc, cc, lci) = match self {
            Mode::Config1 => (true, false, false),
            Mode::Config2 => (false, true, false),
            Mode::Config3 => (false, false, true),
            Mode::Config4 => (true, true, false),
            Mode::Config5 => (true, true, true),
            _ => return None,
        };
        Some(Families { gcc, cc, lci })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Cpa => "cpa",
            Mode::Baseline => "baseline",
            Mode::Lp => "lp",
            Mode::Config1 => "config1",
            Mode::Config2 => "config2",
            Mode::Config3 => "config3",
            Mode::Config4 => "config4",
            Mode::Config5 => "config5",
        };
        f.write_str(s)
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| format!("unknown mode `{s}`; expected cpa, baseline, lp or config1..config5"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Families {
    pub gcc: bool,
    pub cc: bool,
    pub lci: bool,
}

impl Families {
    pub const ALL: Families = Families {
        gcc: true,
        cc: true,
        lci: true,
    };
    pub const NONE: Families = Families {
        gcc: false,
        cc: false,
        lci: false,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub time_limit: Duration,
    /// The cutting-plane phase stops once a round improves the bound by at most this.
    pub root_tolerance: f64,
    /// The baseline stops separating at a node once a round improves by at most this.
    pub node_tolerance: f64,
    pub gcc: FilterParams,
    pub cc: FilterParams,
    pub lci: FilterParams,
    /// Families separated by the cutting-plane pipeline.
    pub families: Families,
    pub lifting: Lifting,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            time_limit: Duration::from_secs(7200),
            root_tolerance: 1e-3,
            node_tolerance: 1e-3,
            gcc: FilterParams::GCC,
            cc: FilterParams::CC,
            lci: FilterParams::LCI,
            families: Families::ALL,
            lifting: Lifting::Sequential,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    TimeLimit,
    /// Only a dual bound was computed (root-only modes).
    Bound,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::TimeLimit => "time-limit",
            SolveStatus::Bound => "bound",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CutCounts {
    pub gcc: usize,
    pub cc: usize,
    pub lci: usize,
}

impl CutCounts {
    fn record(&mut self, cut: &Cut) {
        match cut.family {
            CutFamily::Gcc => self.gcc += 1,
            CutFamily::Cc => self.cc += 1,
            CutFamily::Lci => self.lci += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.gcc + self.cc + self.lci
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PhaseTimes {
    pub preprocess: f64,
    pub root: f64,
    pub branch: f64,
}

impl PhaseTimes {
    pub fn total(&self) -> f64 {
        self.preprocess + self.root + self.branch
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub instance: String,
    pub mode: Mode,
    pub status: SolveStatus,
    /// Reward of the best route set found.
    pub lower_bound: Option<u64>,
    /// Best dual bound; absent once infeasibility is proven.
    pub upper_bound: Option<f64>,
    /// Routes of the incumbent, in vertex ids of the input instance.
    pub routes: Vec<Vec<usize>>,
    /// Root relaxation before any cut.
    pub lp_bound: Option<f64>,
    /// Root bound after the cutting-plane phase.
    pub root_bound: Option<f64>,
    pub cut_rounds: usize,
    pub cuts: CutCounts,
    pub nodes: u64,
    pub times: PhaseTimes,
    /// Every cut added to the model, in vertex ids of the input instance.
    #[serde(skip)]
    pub cut_log: Vec<Cut>,
}

impl SolveReport {
    fn new(inst: &StopInstance, mode: Mode) -> Self {
        SolveReport {
            instance: inst.name().to_string(),
            mode,
            status: SolveStatus::Bound,
            lower_bound: None,
            upper_bound: None,
            routes: Vec::new(),
            lp_bound: None,
            root_bound: None,
            cut_rounds: 0,
            cuts: CutCounts::default(),
            nodes: 0,
            times: PhaseTimes::default(),
            cut_log: Vec::new(),
        }
    }

    fn infeasible(mut self) -> Self {
        self.status = SolveStatus::Infeasible;
        self.upper_bound = None;
        self
    }

    /// Relative gap `(UB − LB)/UB`: zero when solved or proven infeasible,
    /// one when no route set is known.
    pub fn gap(&self) -> f64 {
        match (self.status, self.lower_bound, self.upper_bound) {
            (SolveStatus::Optimal | SolveStatus::Infeasible, _, _) => 0.0,
            (_, Some(lb), Some(ub)) if ub > 0.0 => ((ub - lb as f64) / ub).max(0.0),
            (_, Some(_), _) => 0.0,
            (_, None, _) => 1.0,
        }
    }
}

/// Solve `inst` with the pipeline selected by `mode`.
pub fn solve(inst: &StopInstance, mode: Mode, config: &SolverConfig) -> Result<SolveReport, SolverError> {
    match mode {
        Mode::Cpa => solve_stop(inst, config),
        Mode::Baseline => solve_baseline(inst, config),
        Mode::Lp => solve_lp(inst),
        _ => {
            let families = mode.families().expect("configuration modes name their families");
            let config = SolverConfig {
                families,
                ..config.clone()
            };
            root_bound(inst, mode, &config)
        }
    }
}

struct Prepared {
    reduced: StopInstance,
    report: SolveReport,
}

/// Preprocess and screen for mandatory vertices no route can reach.
fn prepare(inst: &StopInstance, mode: Mode) -> Result<Prepared, SolveReport> {
    let started = Instant::now();
    let (reduced, pre) = preprocess(inst);
    let mut report = SolveReport::new(inst, mode);
    report.times.preprocess = started.elapsed().as_secs_f64();
    if !pre.infeasible_mandatory.is_empty() {
        return Err(report.infeasible());
    }
    Ok(Prepared { reduced, report })
}

/// Root relaxation of the remaining-time model.
pub fn solve_lp(inst: &StopInstance) -> Result<SolveReport, SolverError> {
    let Prepared { reduced, mut report } = match prepare(inst, Mode::Lp) {
        Ok(p) => p,
        Err(r) => return Ok(r),
    };
    let started = Instant::now();
    let Ok(h) = build_remaining_time(&reduced, RemainingTimeOptions::default()) else {
        return Ok(report.infeasible());
    };
    let mut engine = SimplexEngine::new(&h.model);
    let status = engine.solve()?;
    report.times.root = started.elapsed().as_secs_f64();
    match status {
        LpStatus::Optimal => {
            report.lp_bound = Some(engine.objective());
            report.root_bound = report.lp_bound;
            report.upper_bound = report.lp_bound;
            Ok(report)
        }
        LpStatus::Infeasible => Ok(report.infeasible()),
        LpStatus::Unbounded => Err(SolverError::Unbounded),
    }
}

/// Shared root work of the cutting-plane pipeline.
fn cpa_root(inst: &StopInstance, mode: Mode, config: &SolverConfig, deadline: Instant) -> Result<Result<(Prepared, RootOutcome), SolveReport>, SolverError> {
    let prepared = match prepare(inst, mode) {
        Ok(p) => p,
        Err(r) => return Ok(Err(r)),
    };
    let Prepared { reduced, mut report } = prepared;
    let started = Instant::now();
    let options = RemainingTimeOptions {
        bounds_as_cuts: true,
        include_lower_time_bounds: true,
    };
    let Ok(h) = build_remaining_time(&reduced, options) else {
        return Ok(Err(report.infeasible()));
    };
    let conflicts = ConflictSet::build(inst, &inst.min_time_matrix()).restricted_to(&reduced);
    let outcome = root::cutting_plane_phase(&reduced, h, &conflicts, config, deadline)?;
    report.times.root = started.elapsed().as_secs_f64();
    let Some(bound) = outcome.bound else {
        return Ok(Err(report.infeasible()));
    };
    report.lp_bound = outcome.lp_bound;
    report.root_bound = Some(bound);
    report.upper_bound = Some(bound);
    report.cut_rounds = outcome.rounds;
    for cut in &outcome.cuts {
        report.cuts.record(cut);
        report.cut_log.push(cut.relabeled(reduced.original_ids()));
    }
    Ok(Ok((Prepared { reduced, report }, outcome)))
}

/// Root cutting-plane phase only, with the families in `config`.
pub fn root_bound(inst: &StopInstance, mode: Mode, config: &SolverConfig) -> Result<SolveReport, SolverError> {
    let deadline = Instant::now() + config.time_limit;
    match cpa_root(inst, mode, config, deadline)? {
        Ok((prepared, _)) => Ok(prepared.report),
        Err(report) => Ok(report),
    }
}

/// The cutting-plane pipeline: preprocessing, root cuts, branch-and-bound.
pub fn solve_stop(inst: &StopInstance, config: &SolverConfig) -> Result<SolveReport, SolverError> {
    let deadline = Instant::now() + config.time_limit;
    let (Prepared { reduced, mut report }, outcome) = match cpa_root(inst, Mode::Cpa, config, deadline)? {
        Ok(p) => p,
        Err(report) => return Ok(report),
    };
    let started = Instant::now();
    let RootOutcome {
        engine, pool, handle, bound, ..
    } = outcome;
    let search = bnb::BranchAndBound {
        inst: &reduced,
        handle: &handle,
        engine,
        pool,
        root_bound: bound.expect("feasible root"),
        deadline,
        node_cuts: None,
        incumbent: heuristic::greedy_routes(&reduced),
    };
    let result = search.run()?;
    report.times.branch = started.elapsed().as_secs_f64();
    finish(inst, &reduced, report, result)
}

/// Elapsed-time model with the total-duration row; connectivity cuts are
/// separated at every node, all violated ones added, until the node bound
/// stalls.
pub fn solve_baseline(inst: &StopInstance, config: &SolverConfig) -> Result<SolveReport, SolverError> {
    let deadline = Instant::now() + config.time_limit;
    let Prepared { reduced, mut report } = match prepare(inst, Mode::Baseline) {
        Ok(p) => p,
        Err(r) => return Ok(r),
    };
    let started = Instant::now();
    let options = ElapsedTimeOptions {
        include_total_duration: true,
        include_lower_time_bounds: true,
    };
    let Ok(h) = build_elapsed_time(&reduced, options) else {
        return Ok(report.infeasible());
    };
    let mut engine = SimplexEngine::new(&h.model);
    match engine.solve()? {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Ok(report.infeasible()),
        LpStatus::Unbounded => return Err(SolverError::Unbounded),
    }
    report.lp_bound = Some(engine.objective());
    report.times.root = started.elapsed().as_secs_f64();
    let started = Instant::now();
    let search = bnb::BranchAndBound {
        inst: &reduced,
        handle: &h,
        engine,
        pool: Pool::new(Vec::new()),
        root_bound: report.lp_bound.expect("root solved"),
        deadline,
        node_cuts: Some(bnb::NodeCuts {
            params: FilterParams {
                max_inner_product: 1.0,
                ..config.gcc
            },
            tolerance: config.node_tolerance,
        }),
        incumbent: heuristic::greedy_routes(&reduced),
    };
    let result = search.run()?;
    report.times.branch = started.elapsed().as_secs_f64();
    finish(inst, &reduced, report, result)
}

fn finish(inst: &StopInstance, reduced: &StopInstance, mut report: SolveReport, result: BranchOutcome) -> Result<SolveReport, SolverError> {
    report.nodes = result.nodes;
    for cut in &result.cuts {
        report.cuts.record(cut);
        report.cut_log.push(cut.relabeled(reduced.original_ids()));
    }
    if let Some((reward, routes)) = result.incumbent {
        let ids = reduced.original_ids();
        let routes: Vec<Vec<usize>> = routes.iter().map(|r| r.iter().map(|&v| ids[v]).collect()).collect();
        let verdict = validate_routes(inst, &routes, Some(reward));
        if !verdict.is_valid() {
            let why: Vec<String> = verdict.violations.iter().map(|v| v.to_string()).collect();
            return Err(SolverError::BadIncumbent(why.join("; ")));
        }
        report.lower_bound = Some(reward);
        report.routes = routes;
    }
    report.status = match (result.complete, report.lower_bound) {
        (true, Some(lb)) => {
            report.upper_bound = Some(lb as f64);
            SolveStatus::Optimal
        }
        (true, None) => return Ok(report.infeasible()),
        (false, lb) => {
            let open = result.open_bound.unwrap_or(f64::NEG_INFINITY);
            report.upper_bound = Some(open.max(lb.map_or(f64::NEG_INFINITY, |v| v as f64)));
            SolveStatus::TimeLimit
        }
    };
    Ok(report)
}
