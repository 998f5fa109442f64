//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria 3, 4, 8 and 9 need the Chao et al. TOP benchmark files. They are
//! looked up in `$STOP_CHAO_DIR`, else in `data/chao` under the workspace
//! root, as `<name>` or `<name>.txt` (for example `p4.3.o.txt`). Without the
//! files those criteria report FAIL and do not fail the run; every other FAIL
//! makes the process exit nonzero.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};
use stop_core::bench::improvement;
use stop_core::formulation::{build_elapsed_time, build_remaining_time, ElapsedTimeOptions, FormulationHandle, RemainingTimeOptions};
use stop_core::instance::{parse_instance, preprocess, random_euclidean, serialize_instance, SplitMix64, StopInstance};
use stop_core::lp::{solve as solve_lp_model, LpStatus};
use stop_core::oracle::{enumerate_optimal, RouteCatalog};
use stop_core::routes::validate_routes;
use stop_core::separation::{separate_lci, Lifting, Provenance, SupportPoint, Term};
use stop_core::solver::{solve, solve_baseline, solve_stop, Mode, SolveReport, SolveStatus, SolverConfig};

const ORACLE_CAP: u64 = 50_000_000;

enum Outcome {
    Pass(String),
    Fail(String),
    /// The benchmark files are absent; reported as FAIL without failing the run.
    NoData(String),
}

type Criterion = fn() -> Outcome;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn lp_value(h: &FormulationHandle) -> Option<f64> {
    let s = solve_lp_model(&h.model, None).expect("LP engine");
    (s.status == LpStatus::Optimal).then_some(s.objective)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Thirty generated instances standing in for the benchmark sample, preprocessed.
fn lp_sample() -> Vec<StopInstance> {
    (0..30u64)
        .map(|seed| {
            let n = 8 + (seed % 14) as usize;
            let fleet = 1 + (seed % 4) as usize;
            preprocess(&random_euclidean(500 + seed, n, fleet, if seed % 3 == 0 { 50 } else { 0 })).0
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let mut compared = 0;
    for inst in lp_sample() {
        let a = build_elapsed_time(&inst, ElapsedTimeOptions::default()).ok().and_then(|h| lp_value(&h));
        let b = build_remaining_time(&inst, RemainingTimeOptions::default()).ok().and_then(|h| lp_value(&h));
        match (a, b) {
            (Some(a), Some(b)) if close(a, b, 1e-6) => compared += 1,
            (None, None) => compared += 1,
            (a, b) => return Outcome::Fail(format!("{}: elapsed-time LP {a:?}, remaining-time LP {b:?}", inst.name())),
        }
    }
    Outcome::Pass(format!("{compared}/30 generated instances agree"))
}

fn criterion_2() -> Outcome {
    let mut worst_slack = f64::INFINITY;
    let mut worst_shift: f64 = 0.0;
    for inst in lp_sample() {
        let Ok(mut h) = build_remaining_time(&inst, RemainingTimeOptions::default()) else { continue };
        let arcs = h.arcs().to_vec();
        for c in h.model.columns.iter_mut() {
            c.objective = 0.0;
        }
        for (k, &(i, j)) in arcs.iter().enumerate() {
            h.model.columns[k].objective = inst.travel_time(i, j);
        }
        let cap = inst.fleet_size() as f64 * inst.time_limit();
        if let Some(v) = lp_value(&h) {
            worst_slack = worst_slack.min(cap + 1e-6 - v);
        }
        let plain = build_elapsed_time(&inst, ElapsedTimeOptions::default()).ok().and_then(|h| lp_value(&h));
        let with_total = ElapsedTimeOptions {
            include_total_duration: true,
            ..Default::default()
        };
        let tight = build_elapsed_time(&inst, with_total).ok().and_then(|h| lp_value(&h));
        match (plain, tight) {
            (Some(a), Some(b)) => worst_shift = worst_shift.max((a - b).abs() / a.abs().max(1.0)),
            (None, None) => {}
            (a, b) => return Outcome::Fail(format!("{}: feasibility changed ({a:?} vs {b:?})", inst.name())),
        }
    }
    check(
        worst_slack >= 0.0 && worst_shift <= 1e-6,
        format!("min slack to m·T {worst_slack:.3e}, max optimum shift from the total-duration row {worst_shift:.1e}"),
    )
}

fn chao_dir() -> PathBuf {
    std::env::var_os("STOP_CHAO_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).ancestors().nth(2).expect("workspace root").join("data/chao"))
}

fn load_chao(name: &str) -> Result<StopInstance, String> {
    let dir = chao_dir();
    let path = [dir.join(name), dir.join(format!("{name}.txt"))]
        .into_iter()
        .find(|p| p.is_file())
        .ok_or_else(|| format!("{name} not found under {}", dir.display()))?;
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    parse_instance(&text, None).map(|i| i.with_name(name)).map_err(|e| format!("{name}: {e}"))
}

/// All benchmark instances whose file name starts with `p<set>.`, sorted.
fn chao_set(set: u32) -> Result<Vec<StopInstance>, String> {
    let dir = chao_dir();
    let entries = std::fs::read_dir(&dir).map_err(|_| format!("benchmark directory {} is missing", dir.display()))?;
    let prefix = format!("p{set}.");
    let mut names: Vec<String> = entries
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.starts_with(&prefix))
        .map(|n| n.trim_end_matches(".txt").to_string())
        .collect();
    names.sort();
    if names.is_empty() {
        return Err(format!("no `{prefix}*` files under {}", dir.display()));
    }
    names.iter().map(|n| load_chao(n)).collect()
}

/// Instances of the table of new optima: name, LP column, LP+cuts column.
const TABLE: [(&str, f64, f64); 8] = [
    ("p4.2.p", 1306.00, 1288.49),
    ("p4.3.m", 1220.71, 1131.82),
    ("p4.3.o", 1287.18, 1230.14),
    ("p4.3.p", 1300.97, 1265.48),
    ("p4.4.l", 972.42, 919.95),
    ("p5.3.x", 1591.07, 1591.07),
    ("p7.2.q", 1129.62, 1089.30),
    ("p7.3.q", 1078.77, 1022.57),
];

fn table_instances() -> Result<Vec<(StopInstance, f64, f64)>, String> {
    TABLE.iter().map(|&(name, lp, cuts)| Ok((load_chao(name)?, lp, cuts))).collect()
}

fn criterion_3() -> Outcome {
    let rows = match table_instances() {
        Ok(r) => r,
        Err(e) => return Outcome::NoData(e),
    };
    let mut misses = Vec::new();
    for (inst, expected, _) in &rows {
        let r = solve(inst, Mode::Lp, &SolverConfig::default()).expect("LP solve");
        match r.lp_bound {
            Some(v) if (v - expected).abs() <= 0.01 => {}
            v => misses.push(format!("{} {v:?} vs {expected}", inst.name())),
        }
    }
    check(misses.is_empty(), if misses.is_empty() { "8/8 LP bounds within 0.01".into() } else { misses.join("; ") })
}

fn criterion_4() -> Outcome {
    let rows = match table_instances() {
        Ok(r) => r,
        Err(e) => return Outcome::NoData(e),
    };
    let mut misses = Vec::new();
    for (inst, _, expected) in &rows {
        let r = solve(inst, Mode::Config5, &SolverConfig::default()).expect("root solve");
        let (Some(lp), Some(ub)) = (r.lp_bound, r.root_bound) else {
            misses.push(format!("{}: no bound", inst.name()));
            continue;
        };
        let tol = if inst.name() == "p5.3.x" { 0.01 } else { 0.01 * expected };
        if ub > lp + 1e-6 || (ub - expected).abs() > tol {
            misses.push(format!("{}: LP {lp:.2} root {ub:.2} vs {expected}", inst.name()));
        }
    }
    check(misses.is_empty(), if misses.is_empty() { "8/8 root bounds in range".into() } else { misses.join("; ") })
}

/// Small instances for the oracle comparison: |N| ≤ 9, m ≤ 3, every other one with mandatory vertices.
fn oracle_sample() -> Vec<StopInstance> {
    (0..50u64)
        .map(|seed| {
            let n = 4 + (seed % 6) as usize;
            let fleet = 1 + (seed % 3) as usize;
            random_euclidean(9000 + seed, n, fleet, if seed % 2 == 0 { 0 } else { 350 })
        })
        .collect()
}

fn oracle_runs() -> &'static [(StopInstance, Option<u64>, Vec<SolveReport>)] {
    static RUNS: std::sync::OnceLock<Vec<(StopInstance, Option<u64>, Vec<SolveReport>)>> = std::sync::OnceLock::new();
    RUNS.get_or_init(|| {
        let config = SolverConfig {
            time_limit: Duration::from_secs(60),
            ..Default::default()
        };
        oracle_sample()
            .into_iter()
            .map(|inst| {
                let best = enumerate_optimal(&inst, ORACLE_CAP).expect("oracle within budget").map(|b| b.reward);
                let reports = vec![solve_stop(&inst, &config).expect("cpa"), solve_baseline(&inst, &config).expect("baseline")];
                (inst, best, reports)
            })
            .collect()
    })
}

fn criterion_5() -> Outcome {
    let mut infeasible = 0;
    for (inst, best, reports) in oracle_runs() {
        infeasible += best.is_none() as usize;
        for r in reports {
            let agrees = match best {
                Some(v) => r.status == SolveStatus::Optimal && r.lower_bound == Some(*v) && validate_routes(inst, &r.routes, Some(*v)).is_valid(),
                None => r.status == SolveStatus::Infeasible,
            };
            if !agrees {
                return Outcome::Fail(format!("{} {}: {} {:?}, oracle {best:?}", inst.name(), r.mode, r.status, r.lower_bound));
            }
        }
    }
    Outcome::Pass(format!("50/50 agree on cpa and baseline ({infeasible} infeasible)"))
}

fn criterion_6() -> Outcome {
    let mut checked = [0usize; 3];
    for (inst, _, reports) in oracle_runs() {
        let catalog = RouteCatalog::build(inst, ORACLE_CAP).expect("catalog within budget");
        for cut in reports.iter().flat_map(|r| &r.cut_log) {
            if !catalog.satisfies(inst, cut, 1e-6, ORACLE_CAP).expect("within budget") {
                return Outcome::Fail(format!("{}: cut violated by a feasible route set: {cut:?}", inst.name()));
            }
            checked[cut.family as usize] += 1;
        }
    }
    check(
        checked.iter().sum::<usize>() > 0,
        format!("{} GCC, {} CC, {} LCI cuts hold on every feasible route set", checked[0], checked[1], checked[2]),
    )
}

/// Instance whose profitable vertices 1..=n carry `scores`; geometry is irrelevant to covers.
fn knapsack_instance(scores: &[u64]) -> StopInstance {
    let n = scores.len() + 2;
    let pts: Vec<(f64, f64)> = (0..n).map(|v| (v as f64, 0.0)).collect();
    let mut s = vec![0.0];
    s.extend(scores.iter().map(|&v| v as f64));
    s.push(0.0);
    StopInstance::euclidean(&pts, &s, 1, 1e6).expect("valid instance")
}

fn lci_system(rng: &mut SplitMix64) -> Result<usize, String> {
    let size = 1 + rng.below(12);
    let scores: Vec<u64> = (0..size).map(|_| 1 + rng.below(20) as u64).collect();
    let values: Vec<f64> = (0..size).map(|_| rng.below(5) as f64 / 4.0).collect();
    let inst = knapsack_instance(&scores);
    let mut point = SupportPoint::new(size + 2);
    values.iter().enumerate().for_each(|(k, &v)| point.set_visit(k + 1, v));
    let total: u64 = scores.iter().sum();
    let bound = (total as f64 * (0.2 + 0.6 * rng.below(1000) as f64 / 1000.0)).floor();
    let capacity = bound as u64;
    let mut produced = 0;
    for lifting in [Lifting::Sequential, Lifting::None] {
        let Some(cut) = separate_lci(&inst, &point, bound, lifting) else { continue };
        produced += 1;
        let Provenance::Lci(summary) = &cut.provenance else { return Err("LCI without summary".into()) };
        let coef = |v: usize| cut.terms.iter().find(|(t, _)| *t == Term::Visit(v)).map_or(0.0, |t| t.1);
        for &(t, c) in &cut.terms {
            let Term::Visit(v) = t else { return Err(format!("arc term in an LCI: {t:?}")) };
            let floor = if summary.cover.contains(&v) { 1.0 } else { 0.0 };
            if c.fract() != 0.0 || c < floor {
                return Err(format!("coefficient {c} on vertex {v}"));
            }
        }
        if cut.rhs.fract() != 0.0 || cut.rhs < 0.0 {
            return Err(format!("right-hand side {}", cut.rhs));
        }
        if lifting == Lifting::None {
            let weight: u64 = summary.cover.iter().map(|&v| scores[v - 1]).sum();
            let minimal = weight > capacity && summary.cover.iter().all(|&v| weight - scores[v - 1] <= capacity);
            let plain = summary.cover.iter().all(|&v| coef(v) == 1.0) && cut.terms.len() == summary.cover.len();
            if !minimal || !plain || cut.rhs != (summary.cover.len() - 1) as f64 {
                return Err(format!("not a minimal cover inequality: {summary:?}"));
            }
        }
        for mask in 0u32..1 << size {
            let chosen = |v: usize| mask >> (v - 1) & 1 == 1;
            let weight: u64 = (1..=size).filter(|&v| chosen(v)).map(|v| scores[v - 1]).sum();
            if weight <= capacity {
                let lhs = cut.lhs(|t| matches!(t, Term::Visit(v) if chosen(v)) as u8 as f64);
                if lhs > cut.rhs + 1e-9 {
                    return Err(format!("scores {scores:?} capacity {capacity}: subset {mask:b} gives {lhs} > {}", cut.rhs));
                }
            }
        }
    }
    Ok(produced)
}

fn criterion_7() -> Outcome {
    let mut rng = SplitMix64::new(7);
    let mut cuts = 0;
    for _ in 0..200 {
        match lci_system(&mut rng) {
            Ok(k) => cuts += k,
            Err(e) => return Outcome::Fail(e),
        }
    }
    check(cuts > 0, format!("{cuts} cuts from 200 systems valid over full enumeration"))
}

fn criterion_8() -> Outcome {
    let set = match chao_set(2) {
        Ok(s) => s,
        Err(e) => return Outcome::NoData(e),
    };
    let config = SolverConfig {
        time_limit: Duration::from_secs(60),
        ..Default::default()
    };
    let mut slow = Vec::new();
    for inst in &set {
        let started = Instant::now();
        let r = solve_stop(inst, &config).expect("cpa");
        if r.status != SolveStatus::Optimal || started.elapsed() > config.time_limit {
            slow.push(format!("{} {}", inst.name(), r.status));
        }
    }
    let solved = set.len() - slow.len();
    check(set.len() == 33 && slow.is_empty(), format!("{solved}/{} set-2 instances optimal within 60 s {slow:?}", set.len()))
}

fn criterion_9() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for set in [1, 3, 7] {
        let insts = match chao_set(set) {
            Ok(s) => s,
            Err(e) => return Outcome::NoData(e),
        };
        let average = |mode: Mode| {
            let gains: Vec<f64> = insts
                .iter()
                .filter_map(|inst| {
                    let r = solve(inst, mode, &SolverConfig::default()).expect("root solve");
                    improvement(r.lp_bound?, r.root_bound?)
                })
                .collect();
            gains.iter().sum::<f64>() / gains.len().max(1) as f64
        };
        let all = average(Mode::Config5);
        let singles = [average(Mode::Config1), average(Mode::Config2), average(Mode::Config3)];
        ok &= singles.iter().all(|&s| all >= s - 0.1);
        lines.push(format!("set {set}: all {all:.2} vs {singles:.2?}"));
    }
    check(ok, lines.join("; "))
}

fn criterion_10() -> Outcome {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance_bench");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).expect("temp dir");
    let mut manifest = String::new();
    for seed in 0..8u64 {
        let name = format!("g{}.{seed}", seed % 3);
        let inst = random_euclidean(700 + seed, 9 + (seed % 5) as usize, 1 + (seed % 3) as usize, if seed % 2 == 0 { 0 } else { 150 });
        std::fs::write(dir.join(format!("{name}.txt")), serialize_instance(&inst).expect("coordinates")).expect("write");
        manifest.push_str(&format!("{name}.txt\n"));
    }
    std::fs::write(dir.join("manifest"), manifest).expect("write");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_stop"))
            .args(["bench", "--manifest"])
            .arg(dir.join("manifest"))
            .args(["--jobs", "3", "--time-limit", "120"])
            .output()
            .expect("bench runs")
    };
    let (a, b) = (run(), run());
    if !a.status.success() || !b.status.success() {
        return Outcome::Fail(String::from_utf8_lossy(&a.stderr).into_owned());
    }
    check(
        a.stdout == b.stdout && !a.stdout.is_empty(),
        format!("{} CSV bytes, identical: {}", a.stdout.len(), a.stdout == b.stdout),
    )
}

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("formulation equivalence", criterion_1),
        ("total-duration redundancy", criterion_2),
        ("LP bounds of the new-optima table", criterion_3),
        ("root bounds of the new-optima table", criterion_4),
        ("oracle equivalence", criterion_5),
        ("cut validity", criterion_6),
        ("LCI lifting oracle", criterion_7),
        ("set 2 solved in CPA mode", criterion_8),
        ("configuration monotonicity", criterion_9),
        ("bench determinism", criterion_10),
    ];
    let mut hard_failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = run();
        let secs = started.elapsed().as_secs_f64();
        let (verdict, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                hard_failures += 1;
                ("FAIL", d)
            }
            Outcome::NoData(d) => ("FAIL", format!("benchmark data unavailable: {d}")),
        };
        println!("criterion {:>2} {verdict}  {name} ({secs:.1} s): {detail}", k + 1);
    }
    if hard_failures > 0 {
        eprintln!("{hard_failures} criteria failed on available data");
        std::process::exit(1);
    }
}
