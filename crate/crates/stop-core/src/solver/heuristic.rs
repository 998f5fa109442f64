use crate::instance::StopInstance;
use crate::routes::validate_routes;

/// Greedy insertion: mandatory vertices first by cheapest detour, then
/// profitable ones by reward per unit of detour. Only used to seed the
/// search with an incumbent, so `None` is always an acceptable answer.
pub(super) fn greedy_routes(inst: &StopInstance) -> Option<(u64, Vec<Vec<usize>>)> {
    let (s, t) = (inst.origin(), inst.destination());
    let limit = inst.time_limit();
    let mut routes: Vec<Vec<usize>> = Vec::new();
    let mut durations: Vec<f64> = Vec::new();
    let mut placed = vec![false; inst.vertex_count()];

    // Cheapest feasible spot for `v`: (route, position, detour). A route index
    // equal to `routes.len()` opens a new vehicle.
    let best_spot = |routes: &[Vec<usize>], durations: &[f64], v: usize| {
        let mut best: Option<(usize, usize, f64)> = None;
        let mut consider = |r: usize, pos: usize, a: usize, b: usize, base: f64, current: f64| {
            if !inst.has_arc(a, v) || !inst.has_arc(v, b) {
                return;
            }
            let detour = inst.travel_time(a, v) + inst.travel_time(v, b) - base;
            if current + detour <= limit && best.map_or(true, |(_, _, d)| detour < d) {
                best = Some((r, pos, detour));
            }
        };
        for (r, route) in routes.iter().enumerate() {
            for pos in 1..route.len() {
                let (a, b) = (route[pos - 1], route[pos]);
                consider(r, pos, a, b, inst.travel_time(a, b), durations[r]);
            }
        }
        if routes.len() < inst.fleet_size() {
            consider(routes.len(), 1, s, t, 0.0, 0.0);
        }
        best
    };

    let insert = |routes: &mut Vec<Vec<usize>>, durations: &mut Vec<f64>, placed: &mut [bool], (r, pos, detour): (usize, usize, f64), v: usize| {
        if r == routes.len() {
            routes.push(vec![s, t]);
            durations.push(0.0);
        }
        routes[r].insert(pos, v);
        durations[r] += detour;
        placed[v] = true;
    };

    for v in inst.mandatory() {
        let spot = best_spot(&routes, &durations, v)?;
        insert(&mut routes, &mut durations, &mut placed, spot, v);
    }
    loop {
        let pick = inst
            .customers()
            .filter(|&v| !placed[v] && inst.reward(v) > 0)
            .filter_map(|v| best_spot(&routes, &durations, v).map(|spot| (v, spot)))
            .max_by(|a, b| {
                let ratio = |&(v, (_, _, d)): &(usize, (usize, usize, f64))| inst.reward(v) as f64 / d.max(1e-9);
                ratio(a).total_cmp(&ratio(b)).then(b.0.cmp(&a.0))
            });
        let Some((v, spot)) = pick else { break };
        insert(&mut routes, &mut durations, &mut placed, spot, v);
    }
    let verdict = validate_routes(inst, &routes, None);
    verdict.is_valid().then_some((verdict.reward, routes))
}
