use super::*;
use crate::formulation::{build_remaining_time, RemainingTimeOptions};
use crate::instance::fixtures::*;
use crate::instance::{preprocess, StopInstance};
use crate::lp::{solve, LpStatus};
use crate::oracle::{enumerate_optimal, RouteCatalog};
use proptest::prelude::*;

const CAP: u64 = 5_000_000;

fn point(n: usize, arcs: &[(usize, usize, f64)]) -> SupportPoint {
    let mut p = SupportPoint::new(n);
    for &(i, j, v) in arcs {
        p.set_arc(i, j, v);
    }
    // Visit values follow the inflow; the origin is always visited.
    for v in 0..n {
        let inflow: f64 = arcs.iter().filter(|a| a.1 == v).map(|a| a.2).sum();
        p.set_visit(v, if v == 0 { 1.0 } else { inflow });
    }
    p
}

fn figure_4a() -> SupportPoint {
    point(6, &[(S, I, 0.3), (I, K, 0.3), (K, J, 0.3), (J, T, 0.3), (S, L, 0.7), (L, T, 0.7)])
}

fn figure_6() -> SupportPoint {
    point(6, &[(S, I, 0.5), (I, K, 0.5), (K, J, 0.5), (S, L, 0.5), (L, J, 0.5), (J, T, 1.0)])
}

fn route_point(inst: &StopInstance, routes: &[Vec<usize>]) -> SupportPoint {
    let mut p = SupportPoint::new(inst.vertex_count());
    p.set_visit(inst.origin(), 1.0);
    p.set_visit(inst.destination(), 1.0);
    for r in routes {
        for w in r.windows(2) {
            p.set_arc(w[0], w[1], 1.0);
        }
        r.iter().for_each(|&v| p.set_visit(v, 1.0));
    }
    p
}

fn loose() -> FilterParams {
    FilterParams {
        abs_violation: 1e-6,
        max_inner_product: 1.0,
    }
}

#[test]
fn conflict_pairs() {
    let inst = figure_one(4.0, 2);
    let set = ConflictSet::build(&inst, &inst.min_time_matrix());
    assert!(set.contains(I, J) && set.contains(J, I));
    // No route joins l with i or k in either order, whatever the time limit.
    let wide = figure_one(1000.0, 2);
    assert_eq!(ConflictSet::build(&wide, &wide.min_time_matrix()).pairs().collect::<Vec<_>>(), vec![(I, L), (L, K)]);

    let arcs: Vec<(usize, usize, f64)> = (0..5).flat_map(|i| (0..5).filter(move |&j| j != i).map(move |j| (i, j, 1.0))).collect();
    let complete = StopInstance::from_arcs(5, &arcs, &[0.0, 1.0, 1.0, 1.0, 0.0], 2, 4.0).unwrap();
    assert!(ConflictSet::build(&complete, &complete.min_time_matrix()).is_empty());
    let relaxed = complete.with_time_limit(1e6).unwrap();
    assert!(ConflictSet::build(&relaxed, &relaxed.min_time_matrix()).is_empty());
}

#[test]
fn conflicts_follow_preprocessing() {
    let inst = figure_one(5.0, 2);
    let set = ConflictSet::build(&inst, &inst.min_time_matrix());
    let (reduced, _) = preprocess(&inst);
    let local = set.restricted_to(&reduced);
    let ids = reduced.original_ids();
    for (i, j) in local.pairs() {
        assert!(set.contains(ids[i], ids[j]));
    }
    assert_eq!(local.len(), set.pairs().filter(|&(i, j)| ids.contains(&i) && ids.contains(&j)).count());
}

#[test]
fn gcc_finds_detached_cycle() {
    // s→a→t carries one unit; b→c→b is a cycle with no way out.
    let arcs: Vec<(usize, usize, f64)> = (0..5).flat_map(|i| (0..5).filter(move |&j| j != i).map(move |j| (i, j, 1.0))).collect();
    let inst = StopInstance::from_arcs(5, &arcs, &[0.0, 1.0, 1.0, 1.0, 0.0], 2, 10.0).unwrap();
    let p = point(5, &[(0, 1, 1.0), (1, 4, 1.0), (2, 3, 1.0), (3, 2, 1.0)]);
    let cuts = separate_gcc(&inst, &p, &FilterParams::GCC);
    assert_eq!(cuts.len(), 1);
    assert_eq!(cuts[0].provenance, Provenance::Gcc { set: vec![2, 3], vertex: 2 });
    assert!((cuts[0].violation(&p) - 1.0).abs() < 1e-12);
}

#[test]
fn gcc_quiet_on_connected_points() {
    let inst = figure_one(4.0, 2);
    assert!(separate_gcc(&inst, &figure_4a(), &FilterParams::GCC).is_empty());
    let best = enumerate_optimal(&inst, CAP).unwrap().unwrap();
    assert!(separate_gcc(&inst, &route_point(&inst, &best.routes), &loose()).is_empty());
}

#[test]
fn cc_cuts_off_figure_6() {
    let inst = figure_one(4.0, 2);
    let conflicts = ConflictSet::build(&inst, &inst.min_time_matrix());
    let p = figure_6();
    let cuts = separate_cc(&inst, &p, &conflicts, &FilterParams::CC);
    let leave = cuts
        .iter()
        .find(|c| matches!(&c.provenance, Provenance::Cc { side: CutSide::Leave, .. }))
        .expect("a cut on the arcs leaving the set");
    assert_eq!(
        leave.provenance,
        Provenance::Cc {
            set: vec![S, I, L, K, J],
            pair: (I, J),
            side: CutSide::Leave
        }
    );
    assert!((leave.violation(&p) - 0.5).abs() < 1e-12);
}

#[test]
fn cc_threshold_is_strict() {
    let inst = figure_one(4.0, 2);
    let conflicts = ConflictSet::build(&inst, &inst.min_time_matrix());
    let p = figure_4a();
    assert!(separate_cc(&inst, &p, &conflicts, &FilterParams::CC).is_empty());
    let lower = FilterParams {
        abs_violation: 0.2,
        ..FilterParams::CC
    };
    let cuts = separate_cc(&inst, &p, &conflicts, &lower);
    // Pairs (i, k) and (i, j) both conflict and give this set; one cut is kept.
    let entering: Vec<&Cut> = cuts
        .iter()
        .filter(|c| matches!(&c.provenance, Provenance::Cc { set, side: CutSide::Enter, .. } if *set == vec![I, K, J]))
        .collect();
    assert_eq!(entering.len(), 1);
    assert!((entering[0].violation(&p) - 0.3).abs() < 1e-12);
}

fn profit_instance(scores: &[u32]) -> StopInstance {
    let n = scores.len() + 2;
    let points: Vec<(f64, f64)> = (0..n).map(|v| (v as f64, 0.0)).collect();
    let all: Vec<f64> = std::iter::once(0.0).chain(scores.iter().map(|&s| s as f64)).chain(std::iter::once(0.0)).collect();
    StopInstance::euclidean(&points, &all, 1, 100.0).unwrap()
}

#[test]
fn lci_lifts_outside_item() {
    let inst = profit_instance(&[3, 3, 3]);
    let mut p = SupportPoint::new(5);
    p.set_visit(1, 0.9);
    p.set_visit(2, 0.9);
    let cut = separate_lci(&inst, &p, 5.4, Lifting::Sequential).unwrap();
    assert_eq!(cut.terms, vec![(Term::Visit(1), 1.0), (Term::Visit(2), 1.0), (Term::Visit(3), 1.0)]);
    assert_eq!(cut.rhs, 1.0);
    assert!((cut.violation(&p) - 0.8).abs() < 1e-12);

    let plain = separate_lci(&inst, &p, 5.4, Lifting::None).unwrap();
    assert_eq!(plain.terms, vec![(Term::Visit(1), 1.0), (Term::Visit(2), 1.0)]);
    assert_eq!(plain.rhs, 1.0);

    assert_eq!(separate_lci(&inst, &SupportPoint::new(5), 5.4, Lifting::Sequential), None);
}

#[test]
fn filter_rules() {
    let inst = figure_one(4.0, 2);
    let p = figure_6();
    let conflicts = ConflictSet::build(&inst, &inst.min_time_matrix());
    let cuts = separate_cc(&inst, &p, &conflicts, &FilterParams::CC);
    let one = filter_cuts(vec![cuts[0].clone()], &FilterParams::CC, &p);
    assert_eq!(one, vec![cuts[0].clone()]);
    let twins = filter_cuts(vec![cuts[0].clone(), cuts[0].clone()], &FilterParams::CC, &p);
    assert_eq!(twins.len(), 1);

    let lone = |k: usize| Cut {
        family: CutFamily::Gcc,
        terms: vec![(Term::Visit(k), 1.0)],
        relation: Relation::Le,
        rhs: 0.0,
        provenance: Provenance::Gcc { set: vec![k], vertex: k },
    };
    let mut q = SupportPoint::new(3);
    q.set_visit(0, 0.5);
    q.set_visit(1, 0.7);
    let kept = filter_cuts(vec![lone(0), lone(1)], &FilterParams::GCC, &q);
    assert_eq!(kept, vec![lone(1), lone(0)]);
}

fn check_lci(scores: &[u32], values: &[f64], lifting: Lifting) -> Result<(), TestCaseError> {
    let inst = profit_instance(scores);
    let mut p = SupportPoint::new(scores.len() + 2);
    values.iter().enumerate().for_each(|(k, &v)| p.set_visit(k + 1, v));
    let bound: f64 = scores.iter().zip(values).map(|(&s, &v)| s as f64 * v).sum();
    let Some(cut) = separate_lci(&inst, &p, bound, lifting) else {
        return Ok(());
    };
    let Provenance::Lci(summary) = &cut.provenance else { unreachable!() };
    prop_assert!(summary.cover.iter().any(|&v| p.visit(v) > 1e-9 && p.visit(v) < 1.0 - 1e-9));
    prop_assert!(summary.down_lifted.iter().all(|&(_, c)| c >= 1));
    prop_assert!(summary.up_lifted.iter().all(|&(_, c)| c >= 0));
    if lifting == Lifting::None {
        prop_assert_eq!(cut.rhs as usize, summary.cover.len() - 1);
    }
    let capacity = (bound + 1e-6).floor() as u64;
    let n = scores.len();
    for mask in 0u32..1 << n {
        let chosen = |k: usize| mask >> k & 1 == 1;
        let weight: u64 = (0..n).filter(|&k| chosen(k)).map(|k| scores[k] as u64).sum();
        if weight <= capacity {
            let lhs = cut.lhs(|t| match t {
                Term::Visit(v) if chosen(v - 1) => 1.0,
                _ => 0.0,
            });
            prop_assert!(lhs <= cut.rhs + 1e-9, "mask {mask:b} gives {lhs} > {}", cut.rhs);
        }
    }
    Ok(())
}

fn cuts_at_root(inst: &StopInstance, conflicts: &ConflictSet) -> Vec<Cut> {
    let h = build_remaining_time(inst, RemainingTimeOptions::default()).unwrap();
    let sol = solve(&h.model, None).unwrap();
    if sol.status != LpStatus::Optimal {
        return Vec::new();
    }
    let p = SupportPoint::from_primal(&h, &sol.primal);
    let mut cuts = separate_gcc(inst, &p, &loose());
    cuts.extend(separate_cc(inst, &p, conflicts, &loose()));
    cuts.extend(separate_lci(inst, &p, sol.objective, Lifting::Sequential));
    cuts.extend(separate_lci(inst, &p, sol.objective, Lifting::None));
    cuts
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lifted_covers_hold_on_the_knapsack(
        items in prop::collection::vec((1u32..10, 0u8..5), 1..12),
        sequential in any::<bool>(),
    ) {
        let scores: Vec<u32> = items.iter().map(|i| i.0).collect();
        // Values on a coarse grid so that zeros and ones occur often.
        let values: Vec<f64> = items.iter().map(|i| i.1 as f64 / 4.0).collect();
        check_lci(&scores, &values, if sequential { Lifting::Sequential } else { Lifting::None })?;
    }

    #[test]
    fn root_cuts_keep_every_route_set(seed in 0u64..10_000) {
        let n = 5 + (seed % 4) as usize;
        let original = random_euclidean(seed, n, 1 + (seed % 2) as usize, if seed % 3 == 0 { 200 } else { 0 });
        let conflicts = ConflictSet::build(&original, &original.min_time_matrix());
        let (inst, _) = preprocess(&original);
        let local = conflicts.restricted_to(&inst);
        let catalog = RouteCatalog::build(&inst, CAP).unwrap();
        for (i, j) in local.pairs() {
            prop_assert!(!catalog.routes.iter().any(|r| r.visits(i) && r.visits(j)));
        }
        for cut in cuts_at_root(&inst, &local) {
            prop_assert!(catalog.satisfies(&inst, &cut, 1e-6, CAP).unwrap(), "{cut:?}");
        }
    }
}
