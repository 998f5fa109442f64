//! Exact solver for the Steiner team orienteering problem: a fleet of `m`
//! vehicles leaves an origin, must visit every mandatory vertex, collects
//! rewards from optional ones, and reaches a destination within a time limit.
//!
//! The pipeline is preprocessing, a remaining-time arc-flow relaxation
//! strengthened by a root cutting-plane phase, then best-bound
//! branch-and-bound over the bundled simplex engine.

pub mod bench;
pub mod formulation;
pub mod instance;
pub mod lp;
pub mod maxflow;
pub mod oracle;
pub mod paths;
pub mod routes;
pub mod scalar;
pub mod separation;
pub mod solver;

/// The graph kernels are generic over the scalar; the solver runs them in `f64`.
pub type MinTimes = paths::MinTimeMatrix<f64>;
pub type Network = maxflow::FlowNetwork<f64>;
