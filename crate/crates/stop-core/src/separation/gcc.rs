use super::{crossing_arcs, Cut, CutFamily, CutSide, FilterParams, Provenance, SupportPoint, Term, VIOLATION_EPS};
use crate::instance::StopInstance;
use crate::lp::Relation;
use std::collections::BTreeMap;

/// Connectivity cuts `Σ_{δ+(V)} x ≥ y_k` violated by more than `params.abs_violation`.
///
/// For every vertex `v` other than the destination, the minimum `v`–`t` cut of
/// the support graph gives the set `V`; `k` is the vertex of `V` with the
/// largest visit value. The origin is never chosen as `k`: its visit variable
/// is fixed to one, yet a route set may leave it idle, so that cut is invalid.
pub fn separate_gcc(inst: &StopInstance, point: &SupportPoint, params: &FilterParams) -> Vec<Cut> {
    let (s, t) = (inst.origin(), inst.destination());
    let net = point.network(inst, 0, false);
    let mut found: BTreeMap<(Vec<usize>, usize), Cut> = BTreeMap::new();
    for v in (0..inst.vertex_count()).filter(|&v| v != t) {
        let cut = net.max_flow_min_cut(v, t);
        let set = cut.source_side;
        if set.len() < 2 || set.binary_search(&t).is_ok() {
            continue;
        }
        // Ties go to the lowest index.
        let Some(k) = set
            .iter()
            .copied()
            .filter(|&j| j != s)
            .fold(None, |best: Option<usize>, j| match best {
                Some(b) if point.visit(b) >= point.visit(j) => Some(b),
                _ => Some(j),
            })
        else {
            continue;
        };
        let mut inside = vec![false; inst.vertex_count()];
        set.iter().for_each(|&u| inside[u] = true);
        let mut terms = crossing_arcs(inst, &inside, CutSide::Leave);
        terms.push((Term::Visit(k), -1.0));
        let cut = Cut {
            family: CutFamily::Gcc,
            terms,
            relation: Relation::Ge,
            rhs: 0.0,
            provenance: Provenance::Gcc { set: set.clone(), vertex: k },
        };
        if cut.violation(point) > params.abs_violation + VIOLATION_EPS {
            found.entry((set, k)).or_insert(cut);
        }
    }
    found.into_values().collect()
}
