#![allow(dead_code)]

use guided_routing::instance::{generate_cvrp, generate_uniform_tsp};
use guided_routing::rng::{rng_from_seed, SearchRng};
use guided_routing::{GenSpec, PenaltyState, RoutingInstance, Solution};
use rand::Rng;

pub fn rng(seed: u64) -> SearchRng {
    rng_from_seed(seed)
}

pub fn tsp(n: usize, seed: u64) -> RoutingInstance {
    generate_uniform_tsp(n, seed).unwrap().normalize().unwrap()
}

/// Small-capacity CVRP so instances have several routes.
pub fn cvrp(n: usize, seed: u64) -> RoutingInstance {
    let mut spec = GenSpec::uniform(n, seed);
    spec.capacity = 15;
    spec.demand_range = (1, 6);
    generate_cvrp(&spec).unwrap().normalize().unwrap()
}

/// Sets a random penalty in 0..=3 on a random subset of edges.
pub fn random_penalties(inst: &RoutingInstance, lambda: f64, rng: &mut SearchRng) -> PenaltyState {
    let mut ps = PenaltyState::new(lambda);
    let n = inst.len();
    for _ in 0..3 * n {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i != j {
            ps.set(i, j, rng.random_range(0..=3));
        }
    }
    ps
}

/// Length recomputed from the node sequence alone.
pub fn length(inst: &RoutingInstance, sol: &Solution) -> f64 {
    match sol {
        Solution::Tour(t) => {
            let o = t.order();
            (0..o.len()).map(|i| inst.dist(o[i], o[(i + 1) % o.len()])).sum()
        }
        Solution::Routes(rs) => rs
            .routes()
            .iter()
            .map(|r| {
                let mut prev = 0;
                let mut s = 0.0;
                for &v in r {
                    s += inst.dist(prev, v);
                    prev = v;
                }
                s + inst.dist(prev, 0)
            })
            .sum(),
    }
}

/// Penalty total recomputed from the node sequence alone, one term per
/// traversal.
pub fn penalty_total(sol: &Solution, ps: &PenaltyState) -> u64 {
    let mut legs = Vec::new();
    match sol {
        Solution::Tour(t) => {
            let o = t.order();
            for i in 0..o.len() {
                legs.push((o[i], o[(i + 1) % o.len()]));
            }
        }
        Solution::Routes(rs) => {
            for r in rs.routes() {
                let mut prev = 0;
                for &v in r {
                    legs.push((prev, v));
                    prev = v;
                }
                legs.push((prev, 0));
            }
        }
    }
    legs.iter().map(|&(a, b)| u64::from(ps.get(a, b))).sum()
}

pub fn augmented(inst: &RoutingInstance, sol: &Solution, ps: &PenaltyState) -> f64 {
    length(inst, sol) + ps.lambda() * penalty_total(sol, ps) as f64
}

/// Optimal tour length by enumerating every permutation with node 0 fixed.
pub fn brute_force_tsp(inst: &RoutingInstance) -> f64 {
    let n = inst.len();
    let mut rest: Vec<usize> = (1..n).collect();
    let mut best = f64::INFINITY;
    permute(&mut rest, 0, &mut |p| {
        let mut c = inst.dist(0, p[0]) + inst.dist(p[p.len() - 1], 0);
        for w in p.windows(2) {
            c += inst.dist(w[0], w[1]);
        }
        if c < best {
            best = c;
        }
    });
    best
}

fn permute(xs: &mut [usize], k: usize, f: &mut impl FnMut(&[usize])) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, f);
        xs.swap(k, i);
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct OracleStats {
    pub moves: usize,
    pub max_err_true: f64,
    pub max_err_aug: f64,
    pub violations: usize,
}

/// Random walk that applies `steps` uniformly drawn moves of `op` (any
/// delta) and compares each stored delta against full recomputation.
pub fn delta_walk(
    inst: &RoutingInstance,
    op: guided_routing::OperatorKind,
    steps: usize,
    seed: u64,
) -> OracleStats {
    use guided_routing::operators::{apply_move, neighbourhood};
    use guided_routing::solution::{initial_solution, validate};
    use guided_routing::{CandidateLists, EvalContext};

    let mut r = rng(seed);
    let ps = random_penalties(inst, 0.3, &mut r);
    let k = CandidateLists::default_k(inst.len()).min(inst.len() - 1);
    let cands = CandidateLists::build(inst, k).unwrap();
    let mut sol = initial_solution(inst, seed);
    let mut stats = OracleStats::default();
    for _ in 0..steps {
        let ctx = EvalContext::new(inst, &ps, &cands);
        let moves = neighbourhood(op, &sol, &ctx, true);
        if moves.is_empty() {
            break;
        }
        let m = moves[r.random_range(0..moves.len())];
        let before_l = length(inst, &sol);
        let before_h = augmented(inst, &sol, &ps);
        apply_move(inst, &mut sol, &m).unwrap();
        let after_l = length(inst, &sol);
        let after_h = augmented(inst, &sol, &ps);
        stats.moves += 1;
        stats.max_err_true = stats.max_err_true.max((m.delta_true - (after_l - before_l)).abs());
        stats.max_err_aug = stats.max_err_aug.max((m.delta_aug - (after_h - before_h)).abs());
        stats.max_err_true = stats.max_err_true.max((sol.cost() - after_l).abs());
        stats.violations += validate(inst, &sol).len();
    }
    stats
}

/// Largest relative error between the analytic log-probability gradient
/// and a five-point central difference, over `coords` parameters (all when
/// `None`).
pub fn gradient_check(
    policy: &mut guided_routing::Policy,
    state: &guided_routing::StateFeatures,
    action: usize,
    coords: Option<Vec<usize>>,
) -> f64 {
    let (_, grad) = policy.log_prob_grad(state, action).unwrap();
    let coords = coords.unwrap_or_else(|| (0..policy.num_params()).collect());
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    for i in coords {
        let orig = policy.params()[i];
        let mut at = |x: f64| {
            policy.params_mut()[i] = x;
            policy.forward(state).unwrap()[action].ln()
        };
        let fd = (-at(orig + 2.0 * h) + 8.0 * at(orig + h) - 8.0 * at(orig - h) + at(orig - 2.0 * h)) / (12.0 * h);
        policy.params_mut()[i] = orig;
        let denom = fd.abs().max(grad[i].abs()).max(1e-8);
        worst = worst.max((fd - grad[i]).abs() / denom);
    }
    worst
}

/// Adds uniform noise in `[-scale, scale]` to every parameter.
pub fn jitter(policy: &mut guided_routing::Policy, scale: f64, seed: u64) {
    let mut r = rng(seed);
    for v in policy.params_mut() {
        *v += r.random_range(-scale..scale);
    }
}
