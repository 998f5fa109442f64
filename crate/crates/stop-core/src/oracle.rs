//! Exhaustive solver for tiny instances, used as ground truth in tests.
//!
//! Every elementary route is enumerated by depth-first search, then sets of
//! pairwise disjoint routes are searched in a canonical order (routes sorted
//! by their smallest customer), so each route set is seen once.

use crate::instance::StopInstance;
use crate::lp::Relation;
use crate::routes::{RouteSet, DURATION_TOL};
use crate::separation::{Cut, Term};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("search exceeded its budget of {0} nodes")]
    BudgetExceeded(u64),
    #[error("the oracle handles at most 64 vertices, got {0}")]
    TooLarge(usize),
}

/// One feasible elementary route.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogRoute {
    pub vertices: Vec<usize>,
    /// Bit set of the customers visited; zero for the direct origin-destination route.
    pub mask: u64,
    pub duration: f64,
}

impl CatalogRoute {
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn visits(&self, v: usize) -> bool {
        self.mask >> v & 1 == 1
    }
}

/// All feasible elementary routes of an instance.
#[derive(Debug, Clone)]
pub struct RouteCatalog {
    pub routes: Vec<CatalogRoute>,
    nodes: u64,
}

struct Budget {
    used: u64,
    cap: u64,
}

impl Budget {
    fn tick(&mut self) -> Result<(), OracleError> {
        self.used += 1;
        if self.used > self.cap {
            Err(OracleError::BudgetExceeded(self.cap))
        } else {
            Ok(())
        }
    }
}

impl RouteCatalog {
    pub fn build(inst: &StopInstance, hard_cap: u64) -> Result<Self, OracleError> {
        let n = inst.vertex_count();
        if n > 64 {
            return Err(OracleError::TooLarge(n));
        }
        let r = inst.min_time_matrix();
        let limit = inst.time_limit() * (1.0 + DURATION_TOL);
        let mut budget = Budget { used: 0, cap: hard_cap };
        let mut routes = Vec::new();
        let mut path = vec![inst.origin()];
        fn dfs(
            inst: &StopInstance,
            r: &crate::paths::MinTimeMatrix<f64>,
            limit: f64,
            path: &mut Vec<usize>,
            mask: u64,
            duration: f64,
            routes: &mut Vec<CatalogRoute>,
            budget: &mut Budget,
        ) -> Result<(), OracleError> {
            budget.tick()?;
            let v = *path.last().expect("path starts at the origin");
            let t = inst.destination();
            for w in 0..inst.vertex_count() {
                if !inst.has_arc(v, w) {
                    continue;
                }
                let d = duration + inst.travel_time(v, w);
                if w == t {
                    if d <= limit {
                        let mut vertices = path.clone();
                        vertices.push(t);
                        routes.push(CatalogRoute {
                            vertices,
                            mask,
                            duration: d,
                        });
                    }
                } else if !inst.is_terminal(w) && mask >> w & 1 == 0 && d + r.get(w, t) <= limit {
                    path.push(w);
                    dfs(inst, r, limit, path, mask | 1 << w, d, routes, budget)?;
                    path.pop();
                }
            }
            Ok(())
        }
        dfs(inst, &r, limit, &mut path, 0, 0.0, &mut routes, &mut budget)?;
        Ok(RouteCatalog {
            routes,
            nodes: budget.used,
        })
    }

    pub fn search_nodes(&self) -> u64 {
        self.nodes
    }

    /// Best total of an additive per-route value over feasible route sets
    /// (at most `m` disjoint routes covering every mandatory vertex), with
    /// the chosen routes. `None` when no route set is feasible.
    pub fn optimize(
        &self,
        inst: &StopInstance,
        value: impl Fn(&CatalogRoute) -> f64,
        maximize: bool,
        hard_cap: u64,
    ) -> Result<Option<(f64, Vec<usize>)>, OracleError> {
        let sign = if maximize { 1.0 } else { -1.0 };
        // Best route per visited set; ties keep the earliest (lexicographically smallest) one.
        let mut best_of: std::collections::BTreeMap<u64, (f64, usize)> = std::collections::BTreeMap::new();
        for (k, route) in self.routes.iter().enumerate() {
            let v = sign * value(route);
            match best_of.get(&route.mask) {
                Some(&(b, _)) if b >= v => {}
                _ => {
                    best_of.insert(route.mask, (v, k));
                }
            }
        }
        let mut options: Vec<(u64, f64, usize)> = best_of.into_iter().map(|(m, (v, k))| (m, v, k)).collect();
        let key = |mask: u64| if mask == 0 { 64 } else { mask.trailing_zeros() };
        options.sort_by_key(|o| (key(o.0), o.0));
        let required: u64 = inst.mandatory().iter().fold(0, |acc, &v| acc | 1 << v);

        struct Search<'a> {
            options: &'a [(u64, f64, usize)],
            required: u64,
            fleet: usize,
            best: Option<(f64, Vec<usize>)>,
            chosen: Vec<usize>,
            budget: Budget,
        }
        impl Search<'_> {
            fn run(&mut self, start: usize, used: u64, total: f64) -> Result<(), OracleError> {
                self.budget.tick()?;
                if used & self.required == self.required && self.best.as_ref().map_or(true, |b| total > b.0) {
                    let routes = self.chosen.iter().map(|&o| self.options[o].2).collect();
                    self.best = Some((total, routes));
                }
                if self.chosen.len() == self.fleet {
                    return Ok(());
                }
                for o in start..self.options.len() {
                    let (mask, v, _) = self.options[o];
                    if mask & used != 0 {
                        continue;
                    }
                    self.chosen.push(o);
                    self.run(o + 1, used | mask, total + v)?;
                    self.chosen.pop();
                }
                Ok(())
            }
        }
        let mut search = Search {
            options: &options,
            required,
            fleet: inst.fleet_size(),
            best: None,
            chosen: Vec::new(),
            budget: Budget { used: 0, cap: hard_cap },
        };
        search.run(0, 0, 0.0)?;
        Ok(search.best.map(|(v, routes)| (sign * v, routes)))
    }

    /// Whether every feasible route set satisfies `cut` within `tol`.
    /// Vacuously true when the instance is infeasible.
    pub fn satisfies(&self, inst: &StopInstance, cut: &Cut, tol: f64, hard_cap: u64) -> Result<bool, OracleError> {
        let n = inst.vertex_count();
        let mut arc = vec![0.0; n * n];
        let mut visit = vec![0.0; n];
        for &(term, c) in &cut.terms {
            match term {
                Term::Arc(i, j) => arc[i * n + j] += c,
                Term::Visit(v) => visit[v] += c,
            }
        }
        // The terminals are visited by every route set, including the empty one.
        let constant = visit[inst.origin()] + visit[inst.destination()];
        let value = |r: &CatalogRoute| {
            r.arcs().map(|(i, j)| arc[i * n + j]).sum::<f64>()
                + r.vertices.iter().filter(|&&v| !inst.is_terminal(v)).map(|&v| visit[v]).sum::<f64>()
        };
        let worst = match cut.relation {
            Relation::Ge => self.optimize(inst, value, false, hard_cap)?,
            _ => self.optimize(inst, value, true, hard_cap)?,
        };
        Ok(worst.map_or(true, |(v, _)| {
            let lhs = v + constant;
            match cut.relation {
                Relation::Ge => lhs >= cut.rhs - tol,
                Relation::Le => lhs <= cut.rhs + tol,
                Relation::Eq => (lhs - cut.rhs).abs() <= tol,
            }
        }))
    }
}

/// A maximum-reward feasible route set, or `None` when the instance is infeasible.
pub fn enumerate_optimal(inst: &StopInstance, hard_cap: u64) -> Result<Option<RouteSet>, OracleError> {
    let catalog = RouteCatalog::build(inst, hard_cap)?;
    let reward = |r: &CatalogRoute| r.vertices.iter().map(|&v| inst.reward(v) as f64).sum::<f64>();
    let Some((_, picks)) = catalog.optimize(inst, reward, true, hard_cap)? else {
        return Ok(None);
    };
    let mut routes: Vec<&CatalogRoute> = picks
        .iter()
        .map(|&k| &catalog.routes[k])
        .filter(|r| r.mask != 0)
        .collect();
    routes.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    let set = RouteSet {
        reward: routes.iter().flat_map(|r| &r.vertices).map(|&v| inst.reward(v)).sum(),
        durations: routes.iter().map(|r| r.duration).collect(),
        routes: routes.into_iter().map(|r| r.vertices.clone()).collect(),
    };
    debug_assert!(crate::routes::validate_routes(inst, &set.routes, Some(set.reward)).is_valid());
    Ok(Some(set))
}
