//! Acceptance run: one PASS/FAIL line per criterion. Numeric arguments
//! select a subset, e.g. `cargo test --test acceptance -- 3 9`.

mod common;

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::Instant;

use guided_routing::gls::{augmented_cost, feature_utility, penalize};
use guided_routing::harness::{
    exact_tsp, generate_instance, instance_seed, published_best, run_benchmark, run_library_instance,
    BenchmarkSpec, Reference,
};
use guided_routing::instance::{generate_uniform_tsp, parse_any};
use guided_routing::search::{solve, train};
use guided_routing::solution::{initial_solution, validate};
use guided_routing::{Feature, OperatorKind, Policy, PolicyConfig, ProblemKind, SearchConfig, StateFeatures, Variant};
use rand::Rng;
use rayon::prelude::*;

const SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn fixture(name: &str) -> guided_routing::RoutingInstance {
    let path = format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_any(&std::fs::read(path).unwrap()).unwrap()
}

/// Held-Karp optima of the first `count` TSP20 instances of the master seed,
/// keyed by instance name.
fn tsp20_optima(count: usize) -> BTreeMap<String, f64> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let inst = generate_instance(ProblemKind::Tsp, 20, instance_seed(SEED, 20, i)).unwrap();
            (inst.name().to_string(), exact_tsp(&inst).unwrap().0)
        })
        .collect()
}

fn c1_distribution(optima: &BTreeMap<String, f64>) -> Outcome {
    let mean = optima.values().sum::<f64>() / optima.len() as f64;
    outcome((mean - 3.84).abs() <= 0.03, format!("mean Held-Karp TSP20 over {} = {mean:.4} (target 3.84 +/- 0.03)", optima.len()))
}

fn c2_tiny_optimality() -> Outcome {
    let hits: usize = (0..50u64)
        .into_par_iter()
        .map(|i| {
            let n = 6 + (i % 4) as usize;
            let inst = generate_uniform_tsp(n, instance_seed(SEED ^ 2, n, i as usize)).unwrap();
            let opt = common::brute_force_tsp(&inst);
            let cfg = SearchConfig { max_steps: 5000, candidate_k: Some(n - 1), seed: i, record_events: false, ..Default::default() };
            let r = solve(&inst, &cfg, None).unwrap();
            usize::from((r.best_cost - opt).abs() <= 1e-9)
        })
        .sum();
    outcome(hits >= 48, format!("{hits}/50 tiny instances solved to the enumerated optimum (need 48)"))
}

fn c3_small_gap(optima: &BTreeMap<String, f64>) -> Outcome {
    let config = SearchConfig { max_steps: 10_000, record_events: false, ..Default::default() };
    let spec = BenchmarkSpec {
        instances_per_size: 100,
        seed: SEED,
        reference: Reference::Known(optima.clone()),
        ..BenchmarkSpec::new(ProblemKind::Tsp, vec![20], config)
    };
    let r = run_benchmark(&spec, None).unwrap();
    let row = &r.rows[0];
    let gap = row.gap_pct.unwrap_or(f64::INFINITY);
    let min_gap = r.records.iter().filter_map(|x| x.gap_pct).fold(f64::INFINITY, f64::min);
    outcome(
        gap <= 1.0 && row.count == 100 && min_gap >= -1e-9,
        format!("mean gap to Held-Karp over {} TSP20 = {gap:.4}% (limit 1%), min per-instance gap {min_gap:.2e}", row.count),
    )
}

fn c4_penalty_effect() -> Outcome {
    let config = SearchConfig { max_steps: 10_000, record_events: false, ..Default::default() };
    let mean = |variant: Variant| {
        let spec = BenchmarkSpec {
            instances_per_size: 100,
            seed: SEED ^ 4,
            record_timing: false,
            ..BenchmarkSpec::new(ProblemKind::Tsp, vec![50], SearchConfig { variant, ..config.clone() })
        };
        run_benchmark(&spec, None).unwrap().rows[0].mean_cost
    };
    let full = mean(Variant::L2gls);
    let none = mean(Variant::NoPenalty);
    let no_reloc = mean(Variant::L2gls3);
    let tol = 1.001;
    outcome(
        full <= none * tol && full <= no_reloc * tol,
        format!("TSP50 x 100: L2GLS {full:.4} vs NO_PENALTY {none:.4} and L2GLS3 {no_reloc:.4}"),
    )
}

fn c5_learning_effect() -> Outcome {
    let cfg = SearchConfig { max_steps: 2000, record_events: false, seed: SEED, ..Default::default() };
    let (policy, _) = train(ProblemKind::Tsp, 20, &cfg, 50).unwrap();
    let spec = BenchmarkSpec {
        instances_per_size: 50,
        seed: SEED ^ 5,
        record_timing: false,
        ..BenchmarkSpec::new(ProblemKind::Tsp, vec![20], cfg)
    };
    let trained = run_benchmark(&spec, Some(&policy)).unwrap();
    let uniform = run_benchmark(&spec, None).unwrap();
    let (t, u) = (trained.rows[0].mean_cost, uniform.rows[0].mean_cost);
    let wins = trained.records.iter().zip(&uniform.records).filter(|(a, b)| matches!((a.best_cost, b.best_cost), (Some(x), Some(y)) if x <= y + 1e-9)).count();
    outcome(t <= u + 1e-9, format!("held-out TSP20 x 50: trained {t:.5} vs uniform {u:.5} ({wins}/50 paired no worse)"))
}

fn c6_delta_oracle() -> Outcome {
    let mut total = common::OracleStats::default();
    for vrp in [false, true] {
        for (o, op) in OperatorKind::ALL.into_iter().enumerate() {
            for i in 0..25u64 {
                let n = 8 + (i as usize * 7) % 40;
                let seed = SEED ^ (i << 8) ^ ((o as u64) << 4) ^ u64::from(vrp);
                let inst = if vrp { common::cvrp(n, seed) } else { common::tsp(n, seed) };
                let s = common::delta_walk(&inst, op, 50, seed);
                total.moves += s.moves;
                total.max_err_true = total.max_err_true.max(s.max_err_true);
                total.max_err_aug = total.max_err_aug.max(s.max_err_aug);
                total.violations += s.violations;
            }
        }
    }
    outcome(
        total.moves >= 10_000 && total.max_err_true <= 1e-9 && total.max_err_aug <= 1e-9 && total.violations == 0,
        format!(
            "{} moves: max |delta_true err| {:.1e}, max |delta_aug err| {:.1e}, {} violations",
            total.moves, total.max_err_true, total.max_err_aug, total.violations
        ),
    )
}

fn c7_gradient() -> Outcome {
    let configs = [(3, 2, 4, 1, 5, 1), (9, 7, 8, 2, 6, 2), (11, 7, 12, 4, 9, 3), (9, 4, 16, 4, 8, 8)];
    let mut worst: f64 = 0.0;
    for (c, &(input_dim, num_actions, embed_dim, heads, hidden, history)) in configs.iter().enumerate() {
        let cfg = PolicyConfig { input_dim, num_actions, embed_dim, heads, hidden, history, learning_rate: 1e-3 };
        let mut p = Policy::new(cfg, c as u64).unwrap();
        common::jitter(&mut p, 0.5, 50 + c as u64);
        let mut r = common::rng(70 + c as u64);
        let n = 3 + 2 * c;
        let nodes = ndarray::Array2::from_shape_fn((n, input_dim), |_| r.random_range(-1.0..1.0));
        let hist = (0..cfg.history_dim()).map(|_| r.random_range(-1.0..1.0)).collect();
        let s = StateFeatures { nodes, history: hist };
        for a in 0..num_actions {
            worst = worst.max(common::gradient_check(&mut p, &s, a, None));
        }
    }
    outcome(worst < 1e-4, format!("{} configurations, max relative error {worst:.2e} (limit 1e-4)", configs.len()))
}

fn c8_gls() -> Outcome {
    let mut failures = Vec::new();
    for i in 0..1000u64 {
        let vrp = i % 2 == 1;
        let n = 4 + (i as usize % 27);
        let inst = if vrp { common::cvrp(n, i) } else { common::tsp(n, i) };
        let mut r = common::rng(i ^ SEED);
        let mut ps = common::random_penalties(&inst, 0.3, &mut r);
        let sol = initial_solution(&inst, i);
        if augmented_cost(&sol, &guided_routing::PenaltyState::new(0.3)) != sol.cost() {
            failures.push(format!("state {i}: h != L with zero penalties"));
        }
        let mut utils = BTreeMap::new();
        for (a, b) in sol.edges() {
            let key = (a.min(b), a.max(b));
            let closed = inst.dist(a, b) / (1.0 + f64::from(ps.get(a, b)));
            if feature_utility(&sol, &ps, &Feature::new(&inst, a, b)) != closed {
                failures.push(format!("state {i}: utility of {key:?}"));
            }
            utils.insert(key, closed);
        }
        let max = utils.values().copied().fold(f64::NEG_INFINITY, f64::max);
        let expect: Vec<(usize, usize)> = utils.iter().filter(|e| *e.1 == max).map(|e| *e.0).collect();
        let got: Vec<(usize, usize)> = penalize(&inst, &sol, &mut ps).iter().map(|f| f.edge).collect();
        if got != expect {
            failures.push(format!("state {i}: penalized {got:?}, brute force {expect:?}"));
        }
    }
    let first = failures.first().cloned().unwrap_or_default();
    outcome(failures.is_empty(), format!("1000 random states, {} failures {first}", failures.len()))
}

fn c9_library() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["eil51.tsp", "pr76.tsp"] {
        let inst = fixture(name);
        let cfg = SearchConfig { max_steps: 40_000, time_limit: Some(300.0), seed: SEED, record_events: false, ..Default::default() };
        let o = run_library_instance(&inst, &cfg, None, published_best(inst.name())).unwrap();
        let gap = o.gap_pct.unwrap();
        pass &= gap <= 5.0;
        parts.push(format!("{} {} (best {}, gap {gap:.2}%, {:.1}s)", o.name, o.best_cost, o.best_known.unwrap(), o.seconds));
    }
    outcome(pass, parts.join("; "))
}

fn c10_cvrp_feasibility() -> Outcome {
    let mut runs = 0;
    let mut violations = 0;
    let mut solve_check = |inst: &guided_routing::RoutingInstance, seed: u64| {
        let cfg = SearchConfig { max_steps: 3000, seed, record_events: false, ..Default::default() };
        let r = solve(inst, &cfg, None).unwrap();
        runs += 1;
        violations += validate(&inst.normalize().unwrap(), &r.best_solution).len();
    };
    solve_check(&fixture("eil22.vrp"), SEED);
    for i in 0..40u64 {
        let n = 10 + (i as usize % 4) * 15;
        let inst = if i % 2 == 0 { common::cvrp(n, i) } else { generate_instance(ProblemKind::Cvrp, n, i).unwrap() };
        solve_check(&inst, i);
    }
    let spec = BenchmarkSpec {
        instances_per_size: 10,
        seed: SEED,
        ..BenchmarkSpec::new(ProblemKind::Cvrp, vec![20, 50], SearchConfig { max_steps: 2000, ..Default::default() })
    };
    let report = run_benchmark(&spec, None).unwrap();
    outcome(
        violations == 0 && report.failures == 0,
        format!("{runs} direct CVRP solves with {violations} violations; benchmark of 20 CVRP runs with {} infeasibility failures", report.failures),
    )
}

fn c11_reproducible_bench() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str| {
        Command::new(env!("CARGO_BIN_EXE_guided-routing"))
            .args(["bench", "--sizes", "20,30", "--instances", "10", "--steps", "2000", "--seed", "7", "--no-timing"])
            .args(["--out", out])
            .current_dir(dir.path())
            .status()
            .unwrap()
            .success()
    };
    let ok = run("a.csv") && run("b.csv");
    let a = std::fs::read(dir.path().join("a.csv")).unwrap_or_default();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap_or_default();
    outcome(ok && !a.is_empty() && a == b, format!("two bench runs, {} bytes each, identical: {}", a.len(), a == b))
}

fn main() -> ExitCode {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let want = |c: usize| selected.is_empty() || selected.contains(&c);
    let needs_optima = want(1) || want(3);
    let optima = if needs_optima { tsp20_optima(if want(1) { 1000 } else { 100 }) } else { BTreeMap::new() };
    let first_hundred: BTreeMap<String, f64> = (0..100)
        .filter_map(|i| {
            let name = format!("tsp20-{}", instance_seed(SEED, 20, i));
            optima.get(&name).map(|&c| (name, c))
        })
        .collect();

    let criteria: Vec<(usize, &str, Box<dyn Fn() -> Outcome>)> = vec![
        (1, "instance distribution", Box::new(|| c1_distribution(&optima))),
        (2, "optimality at tiny scale", Box::new(c2_tiny_optimality)),
        (3, "small-scale gap", Box::new(|| c3_small_gap(&first_hundred))),
        (4, "penalty effect", Box::new(c4_penalty_effect)),
        (5, "learning effect", Box::new(c5_learning_effect)),
        (6, "delta oracle", Box::new(c6_delta_oracle)),
        (7, "gradient check", Box::new(c7_gradient)),
        (8, "GLS unit suite", Box::new(c8_gls)),
        (9, "TSPLIB generalization", Box::new(c9_library)),
        (10, "CVRP feasibility", Box::new(c10_cvrp_feasibility)),
        (11, "bench reproducibility", Box::new(c11_reproducible_bench)),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        if !want(id) {
            continue;
        }
        let t = Instant::now();
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "criterion {id:>2} {:<4} {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
