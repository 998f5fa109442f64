//! Route sets and an independent feasibility check.

use crate::instance::StopInstance;
use serde::Serialize;
use std::fmt;

/// Slack allowed on route durations, relative to the time limit.
pub const DURATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteSet {
    pub routes: Vec<Vec<usize>>,
    pub reward: u64,
    pub durations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    VertexOutOfRange { route: usize, vertex: usize },
    BadEndpoints { route: usize },
    MissingArc { route: usize, from: usize, to: usize },
    DurationExceeded { route: usize, duration: f64 },
    DuplicateVisit { vertex: usize },
    MandatoryMissed { vertex: usize },
    TooManyRoutes { routes: usize, fleet: usize },
    RewardMismatch { claimed: u64, actual: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::VertexOutOfRange { route, vertex } => write!(f, "route {route}: vertex {vertex} does not exist"),
            Violation::BadEndpoints { route } => write!(f, "route {route}: must start at the origin and end at the destination"),
            Violation::MissingArc { route, from, to } => write!(f, "route {route}: no arc {from}->{to}"),
            Violation::DurationExceeded { route, duration } => write!(f, "route {route}: duration {duration} exceeds the time limit"),
            Violation::DuplicateVisit { vertex } => write!(f, "vertex {vertex} is visited more than once"),
            Violation::MandatoryMissed { vertex } => write!(f, "mandatory vertex {vertex} is not visited"),
            Violation::TooManyRoutes { routes, fleet } => write!(f, "{routes} routes for a fleet of {fleet}"),
            Violation::RewardMismatch { claimed, actual } => write!(f, "claimed reward {claimed}, routes collect {actual}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub violations: Vec<Violation>,
    pub reward: u64,
    pub durations: Vec<f64>,
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check every feasibility rule on `routes`, reporting all violations.
pub fn validate_routes(inst: &StopInstance, routes: &[Vec<usize>], claimed_reward: Option<u64>) -> Verdict {
    let n = inst.vertex_count();
    let (s, t) = (inst.origin(), inst.destination());
    let mut violations = Vec::new();
    let mut visits = vec![0usize; n];
    let mut durations = Vec::new();
    if routes.len() > inst.fleet_size() {
        violations.push(Violation::TooManyRoutes {
            routes: routes.len(),
            fleet: inst.fleet_size(),
        });
    }
    for (r, route) in routes.iter().enumerate() {
        if let Some(&v) = route.iter().find(|&&v| v >= n) {
            violations.push(Violation::VertexOutOfRange { route: r, vertex: v });
            durations.push(f64::NAN);
            continue;
        }
        if route.len() < 2 || route[0] != s || route[route.len() - 1] != t {
            violations.push(Violation::BadEndpoints { route: r });
        }
        let mut duration = 0.0;
        for w in route.windows(2) {
            if !inst.has_arc(w[0], w[1]) {
                violations.push(Violation::MissingArc { route: r, from: w[0], to: w[1] });
            }
            duration += inst.travel_time(w[0], w[1]);
        }
        if duration > inst.time_limit() * (1.0 + DURATION_TOL) {
            violations.push(Violation::DurationExceeded { route: r, duration });
        }
        durations.push(duration);
        for &v in route {
            if !inst.is_terminal(v) {
                visits[v] += 1;
            }
        }
    }
    for v in inst.customers() {
        if visits[v] > 1 {
            violations.push(Violation::DuplicateVisit { vertex: v });
        }
        if inst.is_mandatory(v) && visits[v] == 0 {
            violations.push(Violation::MandatoryMissed { vertex: v });
        }
    }
    let reward = inst.customers().filter(|&v| visits[v] > 0).map(|v| inst.reward(v)).sum();
    if let Some(claimed) = claimed_reward {
        if claimed != reward {
            violations.push(Violation::RewardMismatch { claimed, actual: reward });
        }
    }
    Verdict {
        violations,
        reward,
        durations,
    }
}

/// Parse one route per line, vertex ids separated by whitespace or commas.
pub fn parse_routes(text: &str) -> Result<Vec<Vec<usize>>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(k, l)| {
            l.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|tok| !tok.is_empty())
                .map(|tok| tok.parse().map_err(|_| format!("line {}: `{tok}` is not a vertex id", k + 1)))
                .collect()
        })
        .collect()
}
