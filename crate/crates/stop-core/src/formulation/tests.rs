use super::*;
use crate::instance::fixtures::*;
use crate::instance::{preprocess, StopInstance};
use crate::lp::{solve, LpStatus};
use crate::oracle::enumerate_optimal;

fn lp_value(h: &FormulationHandle) -> Option<f64> {
    let s = solve(&h.model, None).unwrap();
    (s.status == LpStatus::Optimal).then_some(s.objective)
}

fn tiny(seed: u64) -> StopInstance {
    let n = 4 + (seed % 5) as usize;
    let fleet = 1 + (seed % 3) as usize;
    preprocess(&random_euclidean(seed, n, fleet, if seed % 2 == 0 { 0 } else { 250 })).0
}

#[test]
fn relaxation_bounds_integer_optimum() {
    let inst = preprocess(&figure_one(4.0, 1)).0;
    let h = build_remaining_time(&inst, RemainingTimeOptions::default()).unwrap();
    let best = enumerate_optimal(&inst, 1_000_000).unwrap().unwrap();
    assert_eq!(best.reward, 2);
    assert!(lp_value(&h).unwrap() >= 2.0 - 1e-9);
}

#[test]
fn empty_objective() {
    let inst = StopInstance::euclidean(&[(0.0, 0.0), (1.0, 0.0)], &[0.0, 0.0], 3, 5.0).unwrap();
    let h = build_remaining_time(&preprocess(&inst).0, RemainingTimeOptions::default()).unwrap();
    assert_eq!(lp_value(&h), Some(0.0));
}

#[test]
fn refuses_unreachable_mandatory() {
    let inst = figure_one(4.0, 1).with_mandatory(&[I]).unwrap();
    assert_eq!(
        build_remaining_time(&inst, RemainingTimeOptions::default()).unwrap_err(),
        FormulationError::UnreachableMandatory(I)
    );
}

#[test]
fn column_layout_and_objective() {
    let inst = tiny(3);
    let h = build_remaining_time(&inst, RemainingTimeOptions::default()).unwrap();
    let a = inst.arc_count();
    assert_eq!(h.model.num_columns(), 2 * a + inst.vertex_count() + 1);
    for v in 0..inst.vertex_count() {
        let c = h.model.columns[h.y_col(v)];
        assert_eq!((c.lower, c.upper, c.objective), (0.0, 1.0, inst.reward(v) as f64));
    }
    for (i, j) in inst.arcs() {
        let x = h.model.columns[h.x_col(i, j).unwrap()];
        assert_eq!((x.lower, x.upper, x.objective), (0.0, 1.0, 0.0));
        assert_eq!(h.model.columns[h.time_col(i, j).unwrap()].lower, 0.0);
    }
    assert_eq!(h.model.columns[h.phi_col()].upper, inst.fleet_size() as f64);
}

#[test]
fn row_counts_follow_closed_forms() {
    for seed in 0..10 {
        for inst in [tiny(seed), random_euclidean(seed, 6, 2, 300)] {
            for bounds_as_cuts in [false, true] {
                let o = RemainingTimeOptions { bounds_as_cuts, include_lower_time_bounds: true };
                let h = build_remaining_time(&inst, o);
                let Ok(h) = h else { continue };
                assert_eq!(h.model.num_rows(), remaining_time_row_count(&inst, o));
                assert_eq!(h.soft_rows.len(), if bounds_as_cuts { inst.arc_count() } else { 0 });
            }
            for include_total_duration in [false, true] {
                let o = ElapsedTimeOptions { include_total_duration, include_lower_time_bounds: true };
                let Ok(h) = build_elapsed_time(&inst, o) else { continue };
                assert_eq!(h.model.num_rows(), elapsed_time_row_count(&inst, o));
            }
        }
    }
}

#[test]
fn both_models_share_their_optimum() {
    for seed in 0..20 {
        let inst = tiny(seed);
        let (Ok(h1), Ok(h2)) = (
            build_elapsed_time(&inst, ElapsedTimeOptions::default()),
            build_remaining_time(&inst, RemainingTimeOptions::default()),
        ) else {
            continue;
        };
        let (a, b) = (lp_value(&h1), lp_value(&h2));
        match (a, b) {
            (Some(a), Some(b)) => assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "seed {seed}: {a} vs {b}"),
            (a, b) => assert_eq!(a.is_some(), b.is_some(), "seed {seed}"),
        }
        let h1d = build_elapsed_time(&inst, ElapsedTimeOptions { include_total_duration: true, ..Default::default() }).unwrap();
        if let (Some(a), Some(c)) = (a, lp_value(&h1d)) {
            assert!((a - c).abs() <= 1e-6 * a.abs().max(1.0));
        }
    }
}

#[test]
fn total_duration_is_implied() {
    for seed in 0..20 {
        let inst = tiny(seed);
        let Ok(mut h) = build_remaining_time(&inst, RemainingTimeOptions::default()) else { continue };
        for c in h.model.columns.iter_mut() {
            c.objective = 0.0;
        }
        for (k, &(i, j)) in inst.arcs().collect::<Vec<_>>().iter().enumerate() {
            h.model.columns[k].objective = inst.travel_time(i, j);
        }
        if let Some(v) = lp_value(&h) {
            assert!(v <= inst.fleet_size() as f64 * inst.time_limit() + 1e-6, "seed {seed}");
        }
    }
}

#[test]
fn mapped_vertices_stay_feasible() {
    let mut rng = crate::instance::SplitMix64::new(99);
    for seed in 0..20 {
        let inst = tiny(seed);
        let (Ok(mut h1), Ok(h2)) = (
            build_elapsed_time(&inst, ElapsedTimeOptions::default()),
            build_remaining_time(&inst, RemainingTimeOptions::default()),
        ) else {
            continue;
        };
        for c in h1.model.columns.iter_mut() {
            c.objective = (rng.below(21) as f64 - 10.0) / 10.0;
        }
        let s = solve(&h1.model, None).unwrap();
        if s.status != LpStatus::Optimal {
            continue;
        }
        let f = map_solution(&h1, &s.primal);
        assert!(h2.model.max_violation(&f) <= 1e-6, "seed {seed}: {}", h2.model.max_violation(&f));
        let back = map_solution(&h2, &f);
        for (a, b) in back.iter().zip(&s.primal) {
            assert!((a - b).abs() <= 1e-9);
        }
    }
}

#[test]
fn mapping_on_single_arcs() {
    let inst = preprocess(&figure_one(5.0, 1)).0;
    let h = build_elapsed_time(&inst, ElapsedTimeOptions::default()).unwrap();
    let mut z = vec![0.0; h.model.num_columns()];
    let k = h.x_col(S, L).unwrap();
    z[k] = 1.0;
    z[h.time_col(S, L).unwrap()] = inst.travel_time(S, L);
    let f = map_solution(&h, &z);
    assert_eq!(f[h.time_col(S, L).unwrap()], 5.0 - 1.0);
    assert_eq!(f[h.time_col(L, T).unwrap()], 0.0);
}
