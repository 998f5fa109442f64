//! STOP instances: a digraph with an origin, a destination, mandatory and
//! profitable vertices, a fleet size and a per-route time limit.
//!
//! Vertex 0 is always the origin and the last vertex the destination; every
//! other vertex is either mandatory or profitable.

mod generate;
mod parse;
mod preprocess;

use crate::paths::MinTimeMatrix;
use serde::Serialize;
use thiserror::Error;

pub use generate::{generate_stop, random_euclidean, SplitMix64};
pub use parse::{parse_instance, serialize_instance};
pub use preprocess::{preprocess, PreprocessReport};

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("an instance needs at least two vertices, got {0}")]
    TooFewVertices(usize),
    #[error("mandatory vertex {0} is the origin, the destination or out of range")]
    BadMandatory(usize),
    #[error("score of vertex {vertex} must be a nonnegative integer, got {score}")]
    BadScore { vertex: usize, score: f64 },
    #[error("fleet size must be at least 1")]
    EmptyFleet,
    #[error("time limit must be positive, got {0}")]
    BadTimeLimit(f64),
    #[error("travel time {from}->{to} must be finite and nonnegative")]
    BadTravelTime { from: usize, to: usize },
    #[error("fraction must lie in [0, 1], got {0}")]
    BadFraction(f64),
    #[error("instance already has mandatory vertices")]
    AlreadyMandatory,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StopInstance {
    name: String,
    n: usize,
    travel_time: Vec<f64>,
    arcs: Vec<bool>,
    scores: Vec<f64>,
    mandatory: Vec<bool>,
    fleet_size: usize,
    time_limit: f64,
    coordinates: Option<Vec<(f64, f64)>>,
    original_ids: Vec<usize>,
}

impl StopInstance {
    /// Complete digraph with Euclidean travel times between `points`.
    pub fn euclidean(
        points: &[(f64, f64)],
        scores: &[f64],
        fleet_size: usize,
        time_limit: f64,
    ) -> Result<Self, InstanceError> {
        let n = points.len();
        let mut travel_time = vec![0.0; n * n];
        for (i, a) in points.iter().enumerate() {
            for (j, b) in points.iter().enumerate() {
                travel_time[i * n + j] = (a.0 - b.0).hypot(a.1 - b.1);
            }
        }
        let arcs = (0..n * n).map(|k| k / n != k % n).collect();
        let mut inst = Self::assemble(n, travel_time, arcs, scores, fleet_size, time_limit)?;
        inst.coordinates = Some(points.to_vec());
        Ok(inst)
    }

    /// Digraph with explicit arcs `(from, to, travel time)`.
    pub fn from_arcs(
        n: usize,
        arc_list: &[(usize, usize, f64)],
        scores: &[f64],
        fleet_size: usize,
        time_limit: f64,
    ) -> Result<Self, InstanceError> {
        let mut travel_time = vec![0.0; n * n];
        let mut arcs = vec![false; n * n];
        for &(i, j, d) in arc_list {
            if i >= n || j >= n || i == j || !d.is_finite() || d < 0.0 {
                return Err(InstanceError::BadTravelTime { from: i, to: j });
            }
            travel_time[i * n + j] = d;
            arcs[i * n + j] = true;
        }
        Self::assemble(n, travel_time, arcs, scores, fleet_size, time_limit)
    }

    fn assemble(
        n: usize,
        travel_time: Vec<f64>,
        arcs: Vec<bool>,
        scores: &[f64],
        fleet_size: usize,
        time_limit: f64,
    ) -> Result<Self, InstanceError> {
        if n < 2 {
            return Err(InstanceError::TooFewVertices(n));
        }
        assert_eq!(scores.len(), n, "one score per vertex");
        if fleet_size == 0 {
            return Err(InstanceError::EmptyFleet);
        }
        if !(time_limit > 0.0 && time_limit.is_finite()) {
            return Err(InstanceError::BadTimeLimit(time_limit));
        }
        for (k, &d) in travel_time.iter().enumerate() {
            if !d.is_finite() || d < 0.0 {
                return Err(InstanceError::BadTravelTime { from: k / n, to: k % n });
            }
        }
        for (v, &s) in scores.iter().enumerate().take(n - 1).skip(1) {
            if !(s >= 0.0 && s.fract() == 0.0 && s < 1e15) {
                return Err(InstanceError::BadScore { vertex: v, score: s });
            }
        }
        Ok(StopInstance {
            name: String::new(),
            n,
            travel_time,
            arcs,
            scores: scores.to_vec(),
            mandatory: vec![false; n],
            fleet_size,
            time_limit,
            coordinates: None,
            original_ids: (0..n).collect(),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Replace the mandatory set. Vertices leave the profitable set when they become mandatory.
    pub fn with_mandatory(mut self, mandatory: &[usize]) -> Result<Self, InstanceError> {
        let mut flags = vec![false; self.n];
        for &v in mandatory {
            if v == 0 || v + 1 >= self.n {
                return Err(InstanceError::BadMandatory(v));
            }
            flags[v] = true;
        }
        self.mandatory = flags;
        Ok(self)
    }

    pub fn with_time_limit(mut self, time_limit: f64) -> Result<Self, InstanceError> {
        if !(time_limit > 0.0 && time_limit.is_finite()) {
            return Err(InstanceError::BadTimeLimit(time_limit));
        }
        self.time_limit = time_limit;
        Ok(self)
    }

    pub fn with_fleet_size(mut self, fleet_size: usize) -> Result<Self, InstanceError> {
        if fleet_size == 0 {
            return Err(InstanceError::EmptyFleet);
        }
        self.fleet_size = fleet_size;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn origin(&self) -> usize {
        0
    }

    pub fn destination(&self) -> usize {
        self.n - 1
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        v == 0 || v + 1 == self.n
    }

    pub fn is_mandatory(&self, v: usize) -> bool {
        self.mandatory[v]
    }

    pub fn is_profitable(&self, v: usize) -> bool {
        !self.is_terminal(v) && !self.mandatory[v]
    }

    pub fn mandatory(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.mandatory[v]).collect()
    }

    pub fn profitable(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.is_profitable(v)).collect()
    }

    /// Vertices other than the origin and the destination.
    pub fn customers(&self) -> std::ops::Range<usize> {
        1..self.n - 1
    }

    /// Reward collected at `v`; zero off the profitable set.
    pub fn reward(&self, v: usize) -> u64 {
        if self.is_profitable(v) {
            self.scores[v] as u64
        } else {
            0
        }
    }

    pub fn score(&self, v: usize) -> f64 {
        self.scores[v]
    }

    pub fn travel_time(&self, i: usize, j: usize) -> f64 {
        self.travel_time[i * self.n + j]
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.arcs[i * self.n + j]
    }

    /// Arcs in row-major order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n * self.n)
            .filter(|&k| self.arcs[k])
            .map(move |k| (k / self.n, k % self.n))
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.iter().filter(|&&a| a).count()
    }

    pub fn fleet_size(&self) -> usize {
        self.fleet_size
    }

    pub fn time_limit(&self) -> f64 {
        self.time_limit
    }

    pub fn coordinates(&self) -> Option<&[(f64, f64)]> {
        self.coordinates.as_deref()
    }

    /// Index of each vertex in the instance this one was derived from.
    pub fn original_ids(&self) -> &[usize] {
        &self.original_ids
    }

    /// All-pairs minimum travel times over the arcs of the instance.
    pub fn min_time_matrix(&self) -> MinTimeMatrix<f64> {
        MinTimeMatrix::floyd_warshall(self.n, |i, j| self.has_arc(i, j).then(|| self.travel_time(i, j)))
    }

    /// Sub-instance on `keep` (which must start with the origin and end with
    /// the destination) restricted to the arcs accepted by `arc_ok`.
    pub(crate) fn restrict(&self, keep: &[usize], arc_ok: impl Fn(usize, usize) -> bool) -> Self {
        let k = keep.len();
        let mut travel_time = vec![0.0; k * k];
        let mut arcs = vec![false; k * k];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                travel_time[a * k + b] = self.travel_time(i, j);
                arcs[a * k + b] = self.has_arc(i, j) && arc_ok(i, j);
            }
        }
        StopInstance {
            name: self.name.clone(),
            n: k,
            travel_time,
            arcs,
            scores: keep.iter().map(|&v| self.scores[v]).collect(),
            mandatory: keep.iter().map(|&v| self.mandatory[v]).collect(),
            fleet_size: self.fleet_size,
            time_limit: self.time_limit,
            coordinates: self.coordinates.as_ref().map(|c| keep.iter().map(|&v| c[v]).collect()),
            original_ids: keep.iter().map(|&v| self.original_ids[v]).collect(),
        }
    }
}
