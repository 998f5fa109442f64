use super::StopInstance;
use serde::Serialize;

/// What preprocessing removed, in vertex ids of the input instance.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PreprocessReport {
    pub removed_vertices: Vec<usize>,
    pub removed_arcs: Vec<(usize, usize)>,
    /// Mandatory vertices no route can reach within the time limit.
    pub infeasible_mandatory: Vec<usize>,
}

/// Drop vertices and arcs that no route within the time limit can use, and
/// every arc entering the origin or leaving the destination.
///
/// Minimum times between surviving vertices are unchanged: any vertex on a
/// shortest path between two survivors is itself a survivor.
pub fn preprocess(inst: &StopInstance) -> (StopInstance, PreprocessReport) {
    let r = inst.min_time_matrix();
    let (s, t) = (inst.origin(), inst.destination());
    let limit = inst.time_limit();
    let mut report = PreprocessReport::default();
    let mut keep = Vec::new();
    for v in 0..inst.vertex_count() {
        if inst.is_terminal(v) || r.get(s, v) + r.get(v, t) <= limit {
            keep.push(v);
        } else {
            report.removed_vertices.push(v);
            if inst.is_mandatory(v) {
                report.infeasible_mandatory.push(v);
            }
        }
    }
    let alive: Vec<bool> = {
        let mut a = vec![false; inst.vertex_count()];
        keep.iter().for_each(|&v| a[v] = true);
        a
    };
    let arc_ok = |i: usize, j: usize| j != s && i != t && r.get(s, i) + inst.travel_time(i, j) + r.get(j, t) <= limit;
    for (i, j) in inst.arcs() {
        if alive[i] && alive[j] && !arc_ok(i, j) {
            report.removed_arcs.push((i, j));
        }
    }
    (inst.restrict(&keep, arc_ok), report)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn vertex_removed_iff_detour_exceeds_limit() {
        let inst = figure_one(4.0, 1);
        let (out, rep) = preprocess(&inst);
        // R[s][i] + R[i][t] = 1 + 4 and R[s][k] + R[k][t] = 2 + 3 both exceed 4.
        assert_eq!(rep.removed_vertices, vec![I, K]);
        assert_eq!(out.original_ids(), &[S, L, J, T]);
        assert!(rep.infeasible_mandatory.is_empty());
        let (_, rep5) = preprocess(&figure_one(5.0, 1));
        assert!(rep5.removed_vertices.is_empty());
    }

    #[test]
    fn tight_limit_keeps_only_terminals_and_direct_paths() {
        let (out, rep) = preprocess(&figure_one(1.5, 1));
        assert_eq!(rep.removed_vertices, vec![I, L, K, J]);
        assert_eq!(out.vertex_count(), 2);
        assert_eq!(out.arc_count(), 0);
    }

    #[test]
    fn unreachable_mandatory_is_reported() {
        let inst = figure_one(4.0, 2).with_mandatory(&[I]).unwrap();
        assert_eq!(preprocess(&inst).1.infeasible_mandatory, vec![I]);
    }

    #[test]
    fn isolated_vertex_removed() {
        let arcs = [(0, 1, 1.0), (1, 3, 1.0)];
        let inst = StopInstance::from_arcs(4, &arcs, &[0.0, 2.0, 3.0, 0.0], 1, 10.0).unwrap();
        let (out, rep) = preprocess(&inst);
        assert_eq!(rep.removed_vertices, vec![2]);
        assert_eq!(out.original_ids(), &[0, 1, 3]);
        assert_eq!(out.arc_count(), 2);
    }

    #[test]
    fn surviving_arcs_fit_the_limit_and_terminal_arcs_vanish() {
        let pts: Vec<(f64, f64)> = (0..7).map(|v| ((v * 37 % 11) as f64, (v * 5 % 7) as f64)).collect();
        let inst = StopInstance::euclidean(&pts, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 0.0], 2, 14.0).unwrap();
        let (out, _) = preprocess(&inst);
        let r = out.min_time_matrix();
        let (s, t) = (out.origin(), out.destination());
        for (i, j) in out.arcs() {
            assert!(j != s && i != t);
            assert!(r.get(s, i) + out.travel_time(i, j) + r.get(j, t) <= out.time_limit());
        }
    }
}
