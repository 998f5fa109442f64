use super::knapsack::knapsack_max;
use super::{Cut, CutFamily, Provenance, SupportPoint, Term};
use crate::instance::StopInstance;
use crate::lp::Relation;
use serde::{Deserialize, Serialize};

/// Values at or beyond this distance from 0 or 1 count as 0 or 1.
const INTEGRALITY_TOL: f64 = 1e-9;
/// Added to the bound before flooring it, so round-off cannot shrink the capacity.
const CAPACITY_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Lifting {
    /// Lift outside items up, then cover items at one down, then the rest up.
    #[default]
    Sequential,
    /// Plain cover inequality.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LciSummary {
    pub cover: Vec<usize>,
    /// Cover vertices at one in the point; these were lifted down.
    pub at_one: Vec<usize>,
    pub down_lifted: Vec<(usize, i64)>,
    pub up_lifted: Vec<(usize, i64)>,
    pub rhs: i64,
}

/// A lifted cover inequality `Σ coef·y ≤ rhs` over the profitable vertices,
/// derived from the knapsack `Σ reward·y ≤ ⌊bound⌋`. The cut is valid for every
/// solution collecting at most `bound`, so `bound` must be a dual bound.
///
/// Returns `None` when the point's positive visit values do not form a cover.
/// The cut may be satisfied by the point; callers check the violation.
pub fn separate_lci(inst: &StopInstance, point: &SupportPoint, bound: f64, lifting: Lifting) -> Option<Cut> {
    let items = inst.profitable();
    let weights: Vec<u64> = items.iter().map(|&v| inst.reward(v)).collect();
    let value: Vec<f64> = items.iter().map(|&v| point.visit(v)).collect();
    let capacity = (bound + CAPACITY_GUARD).floor().max(0.0) as u64;

    // Greedy cover in non-increasing value, ties by vertex.
    let mut order: Vec<usize> = (0..items.len()).filter(|&k| value[k] > INTEGRALITY_TOL).collect();
    order.sort_by(|&a, &b| value[b].total_cmp(&value[a]).then(a.cmp(&b)));
    let mut cover = Vec::new();
    let mut weight = 0u64;
    for &k in &order {
        cover.push(k);
        weight += weights[k];
        if weight > capacity {
            break;
        }
    }
    if weight <= capacity {
        return None;
    }
    // Minimalize, trying the smallest values first.
    for pos in (0..cover.len()).rev() {
        let k = cover[pos];
        if weight - weights[k] > capacity {
            weight -= weights[k];
            cover.remove(pos);
        }
    }

    let in_cover = |k: usize| cover.contains(&k);
    let at_one: Vec<usize> = cover.iter().copied().filter(|&k| value[k] >= 1.0 - INTEGRALITY_TOL).collect();
    if at_one.len() == cover.len() {
        // Only reachable through round-off: a cover at one would exceed the bound itself.
        return None;
    }
    let mut coef = vec![0i64; items.len()];
    let mut down_lifted = Vec::new();
    let mut up_lifted = Vec::new();
    let mut rhs;
    match lifting {
        Lifting::None => {
            cover.iter().for_each(|&k| coef[k] = 1);
            rhs = cover.len() as i64 - 1;
        }
        Lifting::Sequential => {
            cover.iter().filter(|k| !at_one.contains(k)).for_each(|&k| coef[k] = 1);
            rhs = (cover.len() - at_one.len()) as i64 - 1;
            let mut outside: Vec<usize> = (0..items.len()).filter(|&k| !in_cover(k)).collect();
            outside.sort_by(|&a, &b| value[b].total_cmp(&value[a]).then(a.cmp(&b)));
            let (positive, zero): (Vec<usize>, Vec<usize>) = outside.into_iter().partition(|&k| value[k] > INTEGRALITY_TOL);

            for &k in &positive {
                let mut fixed = at_one.clone();
                fixed.push(k);
                let lift = knapsack_max(&coef, &weights, capacity, &[], &fixed).map_or(0, |(best, _)| (rhs - best).max(0));
                coef[k] = lift;
                up_lifted.push((items[k], lift));
            }
            for (pos, &k) in at_one.iter().enumerate() {
                let fixed = &at_one[pos + 1..];
                // A minimal cover minus any of its items fits, so this is feasible.
                let (best, _) = knapsack_max(&coef, &weights, capacity, &[k], fixed).expect("cover items at one fit");
                let lift = best - rhs;
                coef[k] = lift;
                rhs += lift;
                down_lifted.push((items[k], lift));
            }
            for &k in &zero {
                let lift = knapsack_max(&coef, &weights, capacity, &[], &[k]).map_or(0, |(best, _)| (rhs - best).max(0));
                coef[k] = lift;
                up_lifted.push((items[k], lift));
            }
        }
    }

    let terms = (0..items.len())
        .filter(|&k| coef[k] != 0)
        .map(|k| (Term::Visit(items[k]), coef[k] as f64))
        .collect();
    Some(Cut {
        family: CutFamily::Lci,
        terms,
        relation: Relation::Le,
        rhs: rhs as f64,
        provenance: Provenance::Lci(LciSummary {
            cover: cover.iter().map(|&k| items[k]).collect(),
            at_one: at_one.iter().map(|&k| items[k]).collect(),
            down_lifted,
            up_lifted,
            rhs,
        }),
    })
}
