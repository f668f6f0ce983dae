//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use cvrp::baselines::{assignment_function, exact_cvrp, itp_unsplittable, BipartiteWeights};
use cvrp::bench::{run_bench, BenchConfig, DISPATCH_RATIO_BAR};
use cvrp::big::{adaptive_round, big_solve, enumerate_tour_types, snap_to_centers, solve_configuration};
use cvrp::general::{
    cluster_small, few_tours_solve, solve, split_tour, Algorithm,
};
use cvrp::generate::{generate, DemandLaw, GeneratorSpec, Layout};
use cvrp::grid::{build_grid, fact6_check, CenterGrid};
use cvrp::io::emit_native;
use cvrp::model::{distance_extremes, has_bounded_distance, verify_solution, Instance, Point, Tour};
use cvrp::params::{derive_params, Overrides, Params};
use cvrp::tsp::tsp;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn params(eps: f64, c: f64, gamma: Option<f64>) -> Params {
    derive_params(eps, Overrides { c: Some(c), gamma, ..Default::default() }).unwrap()
}

fn layout(kind: usize, rng: &mut ChaCha8Rng) -> Layout {
    match kind % 4 {
        0 => Layout::Annulus { inner: 1.0, outer: rng.gen_range(1.2..2.0) },
        1 => Layout::UniformDisk { radius: rng.gen_range(1.0..10.0) },
        2 => Layout::Clustered { clusters: rng.gen_range(1..5), radius: 4.0, spread: 0.5 },
        _ => Layout::CoLocated { at: Point::new(rng.gen_range(0.5..3.0), rng.gen_range(-3.0..3.0)) },
    }
}

fn demand_law(kind: usize, eps: f64, rng: &mut ChaCha8Rng) -> DemandLaw {
    match kind % 4 {
        0 => DemandLaw::MixedBigSmall { p_big: rng.gen_range(0.0..1.0), epsilon: eps },
        1 => DemandLaw::Uniform { lo: 0.01, hi: 1.0 },
        2 => DemandLaw::Uniform { lo: 0.01, hi: eps * 0.99 },
        _ => DemandLaw::Uniform { lo: eps, hi: 1.0 },
    }
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize, eps: f64) -> Instance {
    let l = layout(rng.gen_range(0..4), rng);
    let d = demand_law(rng.gen_range(0..4), eps, rng);
    generate(&GeneratorSpec { layout: l, n, demand: d, seed: rng.gen() }).unwrap()
}

/// Big-only instance within the annulus [1, 2), optionally with co-located terminals.
fn big_instance(rng: &mut ChaCha8Rng, n: usize, eps: f64) -> Instance {
    let spots: Vec<Point> = (0..rng.gen_range(1..=n))
        .map(|_| Point::from_polar(rng.gen_range(1.0..2.0), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let sites: Vec<(Point, f64)> = (0..n)
        .map(|_| (spots[rng.gen_range(0..spots.len())], rng.gen_range(eps..=1.0)))
        .collect();
    Instance::new(Point::ORIGIN, sites).unwrap()
}

fn feasible(instance: &Instance, solution: &cvrp::Solution) -> Result<(), String> {
    let r = verify_solution(instance, solution);
    if r.is_feasible() {
        Ok(())
    } else {
        Err(r.to_string().replace('\n', " "))
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = params(0.4, 2.0, Some(4.0));
    let mut runs = BTreeMap::<&str, usize>::new();
    for trial in 0..1000 {
        let n = rng.gen_range(1..=60);
        let inst = random_instance(&mut rng, n, p.epsilon);
        let seed = trial as u64;
        let ctx = |path: &str, e: String| format!("trial {trial} n={n} {path}: {e}");
        let all_big = inst.terminals().iter().all(|t| p.is_big(t.demand));
        if all_big && has_bounded_distance(&inst, p.c) {
            let out = big_solve(&inst, &p).map_err(|e| ctx("big", e.to_string()))?;
            feasible(&inst, &out.solution).map_err(|e| ctx("big", e))?;
            *runs.entry("big").or_default() += 1;
        }
        for (name, alg) in [
            ("many-tours", Algorithm::ManyTours),
            ("dispatch", Algorithm::Auto),
            ("itp", Algorithm::Itp),
        ] {
            let out = solve(&inst, &p, alg, seed).map_err(|e| ctx(name, e.to_string()))?;
            feasible(&inst, &out.solution).map_err(|e| ctx(name, e))?;
            *runs.entry(name).or_default() += 1;
        }
        let out = few_tours_solve(&inst, &p, seed).map_err(|e| ctx("few-tours", e.to_string()))?;
        feasible(&inst, &out.solution).map_err(|e| ctx("few-tours", e))?;
        *runs.entry("few-tours").or_default() += 1;
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(300) {
        return Err(format!("took {elapsed:?}, limit 5 min"));
    }
    Ok(format!("all runs feasible {runs:?} in {:.1}s", elapsed.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for trial in 0..200 {
        let eps = [0.3, 0.4, 0.5][trial % 3];
        let mut p = params(eps, 2.0, None);
        if trial % 2 == 1 {
            // Make adaptive rounding act on small centers.
            p.beta = 0.5;
        }
        let n = rng.gen_range(1..=8);
        let inst = big_instance(&mut rng, n, eps);
        let grid = build_grid(&inst, &p).map_err(|e| e.to_string())?;
        let rounded = adaptive_round(&snap_to_centers(&inst, &grid, &p).map_err(|e| e.to_string())?, &p);
        let catalog = enumerate_tour_types(&rounded, &p).map_err(|e| e.to_string())?;
        let config = solve_configuration(&catalog, &p).map_err(|e| e.to_string())?;
        let snapped_instance = rounded.to_instance().map_err(|e| e.to_string())?;
        let (_, opt) = exact_cvrp(&snapped_instance).map_err(|e| e.to_string())?;
        let gap = (config.cost - opt).abs();
        worst = worst.max(gap);
        if gap > 1e-6 {
            return Err(format!("trial {trial}: configuration {} vs exact {opt}", config.cost));
        }
    }
    Ok(format!("200 instances, max |config - exact| = {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = params(0.4, 2.0, None);
    let mut worst = f64::NEG_INFINITY;
    for trial in 0..500 {
        let n = rng.gen_range(1..=40);
        let inst = random_instance(&mut rng, n, 0.4);
        let mut points = vec![inst.depot()];
        points.extend(inst.terminals().iter().map(|t| t.location));
        let t = tsp(&points, &p, trial).map_err(|e| e.to_string())?.rotated_to(0);
        let order: Vec<usize> = t.order[1..].iter().map(|&k| k - 1).collect();
        let out = itp_unsplittable(&inst, &order).map_err(|e| format!("trial {trial}: {e}"))?;
        feasible(&inst, &out.solution)?;
        let cost = verify_solution(&inst, &out.solution).cost;
        let charge: f64 = inst
            .terminals()
            .iter()
            .map(|v| 4.0 * v.location.dist(&inst.depot()) * v.demand)
            .sum();
        let slack = cost - (t.cost + charge);
        worst = worst.max(slack);
        if slack > 1e-9 {
            return Err(format!("trial {trial}: cost {cost} > {} + {charge}", t.cost));
        }
    }
    Ok(format!("500 trials, max cost - bound = {worst:.3e}"))
}

fn random_system(rng: &mut ChaCha8Rng, max_side: usize) -> BipartiteWeights {
    let na = rng.gen_range(1..=max_side);
    let nb = rng.gen_range(1..=max_side);
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for b in 0..nb {
        let mut total = 0.0;
        for a in 0..na {
            if rng.gen_bool(0.5) || a == (b % na) {
                let w = rng.gen_range(0.0..1.0);
                total += w;
                edges.push(((a, b), w));
            }
        }
        weights.push(total * rng.gen_range(0.0..=1.0));
    }
    BipartiteWeights::new(na, weights, edges).unwrap()
}

fn exhaustive_exists(g: &BipartiteWeights) -> bool {
    let neighbours: Vec<Vec<usize>> = (0..g.b_count())
        .map(|b| g.neighbours(b).into_iter().map(|(a, _)| a).collect())
        .collect();
    let bound = g.max_b_weight() + 1e-9;
    let mut choice = vec![0usize; g.b_count()];
    loop {
        let f: Vec<usize> = choice.iter().zip(&neighbours).map(|(&k, n)| n[k]).collect();
        if g.excess(&f).iter().all(|&e| e <= bound) {
            return true;
        }
        let mut k = 0;
        loop {
            if k == choice.len() {
                return false;
            }
            choice[k] += 1;
            if choice[k] < neighbours[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    for trial in 0..500 {
        let max_side = if trial % 2 == 0 { 5 } else { 8 };
        let g = random_system(&mut rng, max_side);
        let f = assignment_function(&g).map_err(|e| format!("trial {trial}: {e}"))?;
        for (b, &a) in f.iter().enumerate() {
            if !g.edges().contains_key(&(a, b)) {
                return Err(format!("trial {trial}: f({b}) = {a} is not a neighbour"));
            }
        }
        let bound = g.max_b_weight() + 1e-9;
        if let Some(e) = g.excess(&f).into_iter().find(|&e| e > bound) {
            return Err(format!("trial {trial}: excess {e} > {bound}"));
        }
        if g.a_count() <= 5 && g.b_count() <= 5 {
            if !exhaustive_exists(&g) {
                return Err(format!("trial {trial}: exhaustive search found no valid function"));
            }
            checked += 1;
        }
    }
    Ok(format!("500 systems within bound, {checked} cross-checked exhaustively"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut lines = Vec::new();
    for (eps, c) in [(0.5, 1.5), (0.4, 2.0), (0.3, 3.0), (0.45, 4.0)] {
        let p = params(eps, c, None);
        let d_min = rng.gen_range(0.5..3.0);
        let grid = CenterGrid::new(Point::ORIGIN, d_min, c * d_min, &p).map_err(|e| e.to_string())?;
        let samples: Vec<Point> = (0..10_000)
            .map(|_| {
                let r = rng.gen_range(d_min..=c * d_min);
                Point::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        let report = fact6_check(&grid, &p, &samples);
        let expected = p.k1 * p.k2;
        if !report.holds() || report.center_count != expected || !report.rejected.is_empty() {
            return Err(format!("eps {eps} C {c}: {report:?}"));
        }
        lines.push(format!(
            "eps={eps} C={c} max={:.3e}<={:.3e} centers={}",
            report.max_distance, report.bound, report.center_count
        ));
    }
    Ok(lines.join("; "))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut segments = 0;
    for trial in 0..200 {
        let eps = [0.2, 0.3, 0.4][trial % 3];
        let p = params(eps, 2.0, None);
        let n = rng.gen_range(1..=60);
        let sites: Vec<(Point, f64)> = (0..n)
            .map(|_| {
                let at = Point::from_polar(rng.gen_range(1.0..2.0), rng.gen_range(0.0..0.8));
                let d = if rng.gen_bool(0.2) { rng.gen_range(eps..=1.0) } else { rng.gen_range(0.001..eps) };
                (at, d)
            })
            .collect();
        let inst = Instance::new(Point::ORIGIN, sites).unwrap();
        let grid = build_grid(&inst, &p).map_err(|e| e.to_string())?;
        let c = cluster_small(&inst, &grid, &p, trial as u64).map_err(|e| e.to_string())?;
        let mut short_per_cell = BTreeMap::<usize, usize>::new();
        for s in &c.map.segments {
            segments += 1;
            let raw: f64 = s.members.iter().map(|&id| inst.demand(id)).sum();
            if (raw - s.raw_demand).abs() > 1e-12 {
                return Err(format!("trial {trial}: raw demand mismatch"));
            }
            if s.raw_demand > 2.0 * eps + 1e-9 {
                return Err(format!("trial {trial}: segment demand {} > 2eps", s.raw_demand));
            }
            if s.raw_demand < eps - 1e-9 {
                *short_per_cell.entry(s.cell).or_default() += 1;
            }
            if s.clustered_demand < eps - 1e-12 {
                return Err(format!("trial {trial}: clustered demand {}", s.clustered_demand));
            }
        }
        if let Some((cell, k)) = short_per_cell.iter().find(|(_, &k)| k > 1) {
            return Err(format!("trial {trial}: cell {cell} has {k} short segments"));
        }
        // Concatenated segments reproduce each cell tour.
        for (cell, tour) in &c.cell_tours {
            let joined: Vec<usize> = c
                .map
                .segments
                .iter()
                .filter(|s| s.cell == *cell)
                .flat_map(|s| s.members.iter().copied())
                .collect();
            if &joined != tour {
                return Err(format!("trial {trial}: cell {cell} segments do not follow the cell tour"));
            }
        }
        if c.instance.terminals().iter().any(|t| t.demand < eps - 1e-12) {
            return Err(format!("trial {trial}: clustered instance has a small terminal"));
        }
    }
    Ok(format!("200 instances, {segments} segments checked"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut splits = 0;
    for trial in 0..500 {
        let k = rng.gen_range(1..=12);
        let total = rng.gen_range(0.05..=1.5);
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
        let sum: f64 = raw.iter().sum();
        let demands: Vec<f64> = raw.iter().map(|d| (d / sum * total).clamp(1e-6, 1.0)).collect();
        let sites: Vec<(Point, f64)> = demands
            .iter()
            .map(|&d| (Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..3.0)), d))
            .collect();
        let inst = Instance::new(Point::ORIGIN, sites).unwrap();
        if inst.total_demand() > 1.5 + 1e-12 {
            continue;
        }
        let mut order: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let tour = Tour::from_visits(order);
        let (t1, t2) = split_tour(&tour, &inst).map_err(|e| format!("trial {trial}: {e}"))?;
        let d1 = t1.demand(&inst);
        if d1 > 1.0 + 1e-9 {
            return Err(format!("trial {trial}: first tour demand {d1}"));
        }
        if let Some(t2) = &t2 {
            splits += 1;
            let d2 = t2.demand(&inst);
            if d2 > 1.0 + 1e-9 || d1 < 0.5 - 1e-12 {
                return Err(format!("trial {trial}: split demands {d1}, {d2}"));
            }
            let c = inst.tour_cost(&tour).unwrap();
            let c12 = inst.tour_cost(&t1).unwrap() + inst.tour_cost(t2).unwrap();
            if c12 > 2.0 * c + 1e-9 {
                return Err(format!("trial {trial}: split cost {c12} > 2 x {c}"));
            }
        }
    }
    let p = params(0.4, 2.0, None);
    let mut worst = 0.0f64;
    for trial in 0..200 {
        let n = rng.gen_range(1..=30);
        let inst = random_instance(&mut rng, n, 0.4);
        let out = few_tours_solve(&inst, &p, trial).map_err(|e| format!("run {trial}: {e}"))?;
        feasible(&inst, &out.solution)?;
        let cost = inst.solution_cost(&out.solution).unwrap();
        if cost > 2.0 * out.backend_cost + 1e-9 {
            return Err(format!("run {trial}: cost {cost} > 2 x {}", out.backend_cost));
        }
        if out.backend_cost > 0.0 {
            worst = worst.max(cost / out.backend_cost);
        }
    }
    Ok(format!(
        "500 tours ({splits} split) safe; 200 runs with max cost/backend = {worst:.4}"
    ))
}

fn criterion_8() -> Outcome {
    let table = run_bench(&BenchConfig {
        sizes: vec![6, 7, 8],
        trials: 50,
        seed: 8,
        algorithms: vec![Algorithm::Auto, Algorithm::Itp],
        params: params(0.4, 2.0, Some(4.0)),
        exact_cap: 10,
        p_big: 0.5,
    })
    .map_err(|e| e.to_string())?;
    print!("{}", table.to_text());
    let auto = table.summary_for(Algorithm::Auto).unwrap();
    let itp = table.summary_for(Algorithm::Itp).unwrap();
    if auto.failures > 0 || itp.failures > 0 {
        return Err(format!("{} auto and {} itp runs failed", auto.failures, itp.failures));
    }
    if let Some(r) = table.rows.iter().find(|r| r.ratio.is_some_and(|x| x < 1.0 - 1e-9)) {
        return Err(format!("ratio below 1: {r:?}"));
    }
    let summary = format!(
        "auto mean {:.4} max {:.4} (bar {DISPATCH_RATIO_BAR}); itp mean {:.4} max {:.4}",
        auto.mean_ratio, auto.max_ratio, itp.mean_ratio, itp.max_ratio
    );
    if auto.max_ratio > DISPATCH_RATIO_BAR {
        return Err(summary);
    }
    Ok(summary)
}

fn run_cli(args: &[&str], threads: &str) -> Result<(Vec<u8>, i32), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cvrp"))
        .args(args)
        .env("CVRP_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.stdout, out.status.code().unwrap_or(-1)))
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let inst = generate(&GeneratorSpec {
        layout: Layout::UniformDisk { radius: 3.0 },
        n: 45,
        demand: DemandLaw::MixedBigSmall { p_big: 0.3, epsilon: 0.4 },
        seed: 9,
    })
    .unwrap();
    let path = dir.path().join("in.cvrp");
    std::fs::write(&path, emit_native(&inst)).map_err(|e| e.to_string())?;
    let path = path.to_str().unwrap().to_string();
    let mut checked = 0;
    for extra in [
        vec!["--alg", "auto", "--override-C", "2", "--override-gamma", "4"],
        vec!["--alg", "auto", "--override-C", "2", "--override-gamma", "4", "--json"],
        vec!["--alg", "few-tours"],
        vec!["--alg", "itp"],
    ] {
        let mut outputs = Vec::new();
        for (k, threads) in ["1", "4", "1", "4", "2"].iter().enumerate() {
            let sol = dir.path().join(format!("sol{k}.txt"));
            let svg = dir.path().join(format!("plot{k}.svg"));
            let mut args = vec!["solve", path.as_str(), "--seed", "5"];
            args.extend(extra.iter().copied());
            let (sol_s, svg_s) = (sol.to_str().unwrap().to_string(), svg.to_str().unwrap().to_string());
            args.extend(["--out", sol_s.as_str(), "--svg", svg_s.as_str()]);
            let (stdout, code) = run_cli(&args, threads)?;
            if code != 0 {
                return Err(format!("{args:?} exited with {code}"));
            }
            let files = (read(&sol)?, read(&svg)?);
            outputs.push((stdout, files));
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("outputs differ for {extra:?}"));
        }
        checked += 1;
    }
    Ok(format!("{checked} argument sets byte-identical over 5 runs with CVRP_THREADS in {{1, 2, 4}}"))
}

fn read(path: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| e.to_string())
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let eps = [0.3, 0.4, 0.5][trial % 3];
        let p = params(eps, 2.0, None);
        let n = rng.gen_range(1..=12);
        let inst = big_instance(&mut rng, n, eps);
        let (lo, hi) = distance_extremes(&inst).unwrap();
        debug_assert!(hi / lo <= 2.0);
        let out = big_solve(&inst, &p).map_err(|e| format!("trial {trial}: {e}"))?;
        feasible(&inst, &out.solution)?;
        let cost = inst.solution_cost(&out.solution).unwrap();
        let displacement: f64 = out.snapped.terminals.iter().map(|t| t.displacement).sum();
        let gap = (cost - out.configured_cost - 2.0 * displacement).abs();
        worst = worst.max(gap);
        if gap > 1e-9 {
            return Err(format!("trial {trial}: gap {gap}"));
        }
    }
    Ok(format!("100 instances, max |cost - configured - 2 x displacement| = {worst:.2e}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("feasibility of every solver path", criterion_1),
        ("configuration search is exact", criterion_2),
        ("ITP cost bound", criterion_3),
        ("assignment excess bound", criterion_4),
        ("grid cell radius and center count", criterion_5),
        ("segment demand invariant", criterion_6),
        ("split safety", criterion_7),
        ("dispatch ratio against the exact optimum", criterion_8),
        ("CLI determinism", criterion_9),
        ("un-snap cost accounting", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let id = format!("criterion {}", k + 1);
        if !filter.is_empty() && !filter.iter().any(|f| id.ends_with(f.as_str()) || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {id}: {name} ({detail}) [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id}: {name} ({detail}) [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
