use super::root::Pool;
use super::{SolverError, INTEGER_TOL};
use crate::formulation::FormulationHandle;
use crate::instance::StopInstance;
use crate::lp::{LpStatus, Row, SimplexEngine};
use crate::separation::{separate_gcc, Cut, FilterParams, SupportPoint};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

/// Connectivity separation at every node, as the baseline does.
pub(super) struct NodeCuts {
    pub params: FilterParams,
    pub tolerance: f64,
}

pub(super) struct BranchAndBound<'a> {
    pub inst: &'a StopInstance,
    pub handle: &'a FormulationHandle,
    pub engine: SimplexEngine,
    pub pool: Pool,
    pub root_bound: f64,
    pub deadline: Instant,
    pub node_cuts: Option<NodeCuts>,
    /// Known feasible solution, in the searched instance's ids.
    pub incumbent: Option<(u64, Vec<Vec<usize>>)>,
}

#[derive(Debug, Clone)]
pub struct BranchOutcome {
    /// Reward and routes of the best integer point, in the searched instance's ids.
    pub incumbent: Option<(u64, Vec<Vec<usize>>)>,
    /// True when the tree was exhausted.
    pub complete: bool,
    /// Largest bound among unexplored nodes when the search stopped early.
    pub open_bound: Option<f64>,
    pub nodes: u64,
    /// Cuts separated inside the tree.
    pub cuts: Vec<Cut>,
}

struct Node {
    bound: f64,
    depth: usize,
    seq: u64,
    /// Column bounds that differ from the root, in branching order.
    fixings: Vec<(usize, f64, f64)>,
}

// Best bound first; deeper nodes, then later ones, break ties.
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then(self.depth.cmp(&other.depth))
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

fn fractionality(v: f64) -> f64 {
    (v - v.floor()).min(v.ceil() - v)
}

impl BranchAndBound<'_> {
    pub fn run(mut self) -> Result<BranchOutcome, SolverError> {
        let columns = self.engine.num_columns();
        let root: Vec<(f64, f64)> = (0..columns).map(|c| self.engine.bounds(c)).collect();
        let mut heap = BinaryHeap::new();
        heap.push(Node {
            bound: self.root_bound,
            depth: 0,
            seq: 0,
            fixings: Vec::new(),
        });
        let mut seq = 0;
        let mut out = BranchOutcome {
            incumbent: self.incumbent.take(),
            complete: false,
            open_bound: None,
            nodes: 0,
            cuts: Vec::new(),
        };
        // Rewards are integers, so a node must promise at least one more unit.
        let pruned = |bound: f64, inc: &Option<(u64, Vec<Vec<usize>>)>| inc.as_ref().is_some_and(|(lb, _)| (bound + 1e-6).floor() <= *lb as f64);
        let mut touched: Vec<usize> = Vec::new();
        while let Some(node) = heap.pop() {
            if pruned(node.bound, &out.incumbent) {
                continue;
            }
            if Instant::now() >= self.deadline {
                heap.push(node);
                break;
            }
            out.nodes += 1;
            for c in touched.drain(..) {
                self.engine.set_bounds(c, root[c].0, root[c].1);
            }
            for &(c, lo, hi) in &node.fixings {
                self.engine.set_bounds(c, lo, hi);
                touched.push(c);
            }
            let Some(value) = self.solve_node(&mut out.cuts)? else {
                continue;
            };
            let bound = value.min(node.bound);
            if pruned(bound, &out.incumbent) {
                continue;
            }
            match self.branching_column() {
                Some((col, v)) => {
                    let (lo, hi) = self.engine.bounds(col);
                    for (lo, hi) in [(lo, v.floor()), (v.ceil(), hi)] {
                        let mut fixings = node.fixings.clone();
                        fixings.push((col, lo, hi));
                        seq += 1;
                        heap.push(Node {
                            bound,
                            depth: node.depth + 1,
                            seq,
                            fixings,
                        });
                    }
                }
                None => {
                    let routes = self.decode()?;
                    let reward = routes.iter().flatten().map(|&v| self.inst.reward(v)).sum();
                    if out.incumbent.as_ref().map_or(true, |(lb, _)| reward > *lb) {
                        out.incumbent = Some((reward, routes));
                    }
                }
            }
        }
        heap.retain(|n| !pruned(n.bound, &out.incumbent));
        out.complete = heap.is_empty();
        out.open_bound = heap.iter().map(|n| n.bound).reduce(f64::max);
        Ok(out)
    }

    /// Solve the current node; `None` when it is infeasible.
    fn solve_node(&mut self, log: &mut Vec<Cut>) -> Result<Option<f64>, SolverError> {
        if self.pool.solve(&mut self.engine)? == LpStatus::Infeasible {
            return Ok(None);
        }
        let mut value = self.engine.objective();
        loop {
            let integral = self.branching_column().is_none();
            let params = match (&self.node_cuts, integral) {
                (Some(nc), false) => nc.params,
                // An integer point gets any violated connectivity cut, however shallow,
                // so that detached cycles of zero length never pass as routes.
                (_, true) => FilterParams {
                    abs_violation: INTEGER_TOL,
                    max_inner_product: 1.0,
                },
                (None, false) => return Ok(Some(value)),
            };
            if Instant::now() >= self.deadline && !integral {
                return Ok(Some(value));
            }
            let point = SupportPoint::from_primal(self.handle, self.engine.primal());
            let cuts = separate_gcc(self.inst, &point, &params);
            if cuts.is_empty() {
                return Ok(Some(value));
            }
            let rows: Vec<Row> = cuts.iter().map(|c| c.to_row(self.handle)).collect();
            self.engine.add_rows(&rows);
            log.extend(cuts);
            if self.pool.solve(&mut self.engine)? == LpStatus::Infeasible {
                return Ok(None);
            }
            let next = self.engine.objective().min(value);
            let improvement = value - next;
            value = next;
            let tolerance = self.node_cuts.as_ref().map_or(0.0, |nc| nc.tolerance);
            if !integral && improvement <= tolerance {
                return Ok(Some(value));
            }
        }
    }

    /// Most fractional arc variable, else most fractional visit variable; ties to the lowest column.
    fn branching_column(&self) -> Option<(usize, f64)> {
        let primal = self.engine.primal();
        let arcs = self.handle.arcs().len();
        let pick = |cols: std::ops::Range<usize>| {
            cols.map(|c| (c, primal[c]))
                .filter(|&(_, v)| fractionality(v) > INTEGER_TOL)
                .fold(None, |best: Option<(usize, f64)>, (c, v)| match best {
                    Some((_, b)) if fractionality(b) >= fractionality(v) => best,
                    _ => Some((c, v)),
                })
        };
        pick(0..arcs).or_else(|| pick(arcs..arcs + self.handle.vertex_count()))
    }

    /// Routes of an integer point: follow the used arcs out of the origin.
    fn decode(&self) -> Result<Vec<Vec<usize>>, SolverError> {
        let n = self.inst.vertex_count();
        let (s, t) = (self.inst.origin(), self.inst.destination());
        let primal = self.engine.primal();
        let mut next = vec![None; n];
        let mut starts = Vec::new();
        for (k, &(i, j)) in self.handle.arcs().iter().enumerate() {
            if primal[k] > 0.5 {
                if i == s {
                    // The direct arc to the destination is an idle vehicle.
                    if j != t {
                        starts.push(j);
                    }
                } else if next[i].replace(j).is_some() {
                    return Err(SolverError::BadIncumbent(format!("vertex {i} is left twice")));
                }
            }
        }
        let mut seen = vec![false; n];
        let mut routes = Vec::new();
        for first in starts {
            let mut route = vec![s];
            let mut v = first;
            while v != t {
                if seen[v] {
                    return Err(SolverError::BadIncumbent(format!("vertex {v} is reached twice")));
                }
                seen[v] = true;
                route.push(v);
                v = next[v].ok_or_else(|| SolverError::BadIncumbent(format!("route stops at {v}")))?;
            }
            route.push(t);
            routes.push(route);
        }
        let y = self.handle.y_values(primal);
        if let Some(v) = self.inst.customers().find(|&v| (y[v] > 0.5) != seen[v]) {
            return Err(SolverError::BadIncumbent(format!("visit of {v} disagrees with the arcs")));
        }
        Ok(routes)
    }
}
