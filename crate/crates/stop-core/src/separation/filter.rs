use super::{Cut, SupportPoint};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterParams {
    /// A cut is kept only when violated by more than this.
    pub abs_violation: f64,
    /// Cuts whose normal has a larger cosine with the deepest cut are dropped.
    pub max_inner_product: f64,
}

impl FilterParams {
    pub const GCC: FilterParams = FilterParams {
        abs_violation: 0.05,
        max_inner_product: 0.03,
    };
    pub const CC: FilterParams = FilterParams {
        abs_violation: 0.3,
        max_inner_product: 0.03,
    };
    /// Only one cover cut is produced per round, so parallelism never matters.
    pub const LCI: FilterParams = FilterParams {
        abs_violation: 1e-5,
        max_inner_product: 1.0,
    };

    pub fn is_valid(&self) -> bool {
        self.abs_violation > 0.0 && self.abs_violation <= 1.0 && self.max_inner_product > 0.0 && self.max_inner_product <= 1.0
    }
}

/// Keep the cut farthest from `point` plus every cut nearly orthogonal to it.
/// The deepest cut comes first; the others keep their input order.
pub fn filter_cuts(candidates: Vec<Cut>, params: &FilterParams, point: &SupportPoint) -> Vec<Cut> {
    let Some(best) = candidates
        .iter()
        .enumerate()
        .map(|(k, c)| (k, c.distance(point)))
        .fold(None, |acc: Option<(usize, f64)>, (k, d)| match acc {
            Some((_, bd)) if bd >= d => acc,
            _ => Some((k, d)),
        })
        .map(|(k, _)| k)
    else {
        return Vec::new();
    };
    let mut rest = candidates;
    let deepest = rest.remove(best);
    let mut kept = vec![];
    for c in rest {
        if deepest.parallelism(&c) <= params.max_inner_product {
            kept.push(c);
        }
    }
    kept.insert(0, deepest);
    kept
}
