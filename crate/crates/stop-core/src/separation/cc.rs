use super::{crossing_arcs, ConflictSet, Cut, CutFamily, CutSide, FilterParams, Provenance, SupportPoint, Term, VIOLATION_EPS};
use crate::instance::StopInstance;
use crate::lp::Relation;
use std::collections::BTreeMap;

/// Conflict cuts `Σ_{δ(V)} x ≥ y_i + y_j` for conflicting pairs, violated by
/// more than `params.abs_violation`.
///
/// For each pair, a sink joined to both vertices by arcs of capacity `m` is
/// added; the minimum cut from the origin gives a set `V` entered by the cut
/// arcs, and the same on the reversed graph from the destination gives a set
/// left by them. Sets that do not hold both vertices of the pair are skipped,
/// and cuts sharing a set and side keep only the most violated one.
pub fn separate_cc(inst: &StopInstance, point: &SupportPoint, conflicts: &ConflictSet, params: &FilterParams) -> Vec<Cut> {
    let n = inst.vertex_count();
    let m = inst.fleet_size() as f64;
    let forward = point.network(inst, 1, false);
    let backward = point.network(inst, 1, true);
    let mut found: BTreeMap<(Vec<usize>, CutSide), (f64, Cut)> = BTreeMap::new();
    for (i, j) in conflicts.pairs() {
        for (base, root, side) in [(&forward, inst.origin(), CutSide::Enter), (&backward, inst.destination(), CutSide::Leave)] {
            let mut net = base.clone();
            net.add_arc(i, n, m);
            net.add_arc(j, n, m);
            let cut = net.max_flow_min_cut(root, n);
            let mut inside = vec![true; n];
            cut.source_side.iter().filter(|&&u| u < n).for_each(|&u| inside[u] = false);
            if !inside[i] || !inside[j] {
                continue;
            }
            let mut terms = crossing_arcs(inst, &inside, side);
            terms.push((Term::Visit(i), -1.0));
            terms.push((Term::Visit(j), -1.0));
            let set: Vec<usize> = (0..n).filter(|&u| inside[u]).collect();
            let cut = Cut {
                family: CutFamily::Cc,
                terms,
                relation: Relation::Ge,
                rhs: 0.0,
                provenance: Provenance::Cc { set: set.clone(), pair: (i, j), side },
            };
            let violation = cut.violation(point);
            if violation <= params.abs_violation + VIOLATION_EPS {
                continue;
            }
            match found.get(&(set.clone(), side)) {
                Some((best, _)) if *best >= violation => {}
                _ => {
                    found.insert((set, side), (violation, cut));
                }
            }
        }
    }
    found.into_values().map(|(_, c)| c).collect()
}
