mod common;

use guided_routing::operators::{apply_move, best_move, neighbourhood, IMPROVE_EPS};
use guided_routing::solution::{initial_solution, validate};
use guided_routing::{CandidateLists, EvalContext, OperatorKind, PenaltyState, Solution};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tsp_deltas_match_recomputation(n in 5usize..30, seed in any::<u64>(), op in 0usize..4) {
        let inst = common::tsp(n, seed);
        let s = common::delta_walk(&inst, OperatorKind::ALL[op], 25, seed ^ 1);
        prop_assert!(s.max_err_true <= 1e-9, "{s:?}");
        prop_assert!(s.max_err_aug <= 1e-9, "{s:?}");
        prop_assert_eq!(s.violations, 0);
    }

    #[test]
    fn cvrp_deltas_match_recomputation(n in 4usize..30, seed in any::<u64>(), op in 0usize..4) {
        let inst = common::cvrp(n, seed);
        let s = common::delta_walk(&inst, OperatorKind::ALL[op], 25, seed ^ 2);
        prop_assert!(s.max_err_true <= 1e-9, "{s:?}");
        prop_assert!(s.max_err_aug <= 1e-9, "{s:?}");
        prop_assert_eq!(s.violations, 0);
    }

    /// With candidate lists covering every node, the chosen move is the
    /// minimum of the enumerated neighbourhood.
    #[test]
    fn best_move_is_neighbourhood_minimum(n in 5usize..16, seed in any::<u64>(), op in 0usize..4, vrp in any::<bool>()) {
        let inst = if vrp { common::cvrp(n, seed) } else { common::tsp(n, seed) };
        let mut r = common::rng(seed);
        let ps = common::random_penalties(&inst, 0.3, &mut r);
        let cands = CandidateLists::build(&inst, inst.len() - 1).unwrap();
        let ctx = EvalContext::new(&inst, &ps, &cands);
        let sol = initial_solution(&inst, seed);
        let op = OperatorKind::ALL[op];
        let min = neighbourhood(op, &sol, &ctx, true).iter().map(|m| m.delta_aug).fold(f64::INFINITY, f64::min);
        match best_move(op, &sol, &ctx) {
            Some(m) => {
                prop_assert!(m.delta_aug < -IMPROVE_EPS);
                prop_assert!((m.delta_aug - min).abs() <= 1e-12, "{} vs {}", m.delta_aug, min);
            }
            None => prop_assert!(!(min < -IMPROVE_EPS), "missed improving move {min}"),
        }
    }

    /// Zero penalties make both deltas the same number.
    #[test]
    fn unpenalized_deltas_coincide(n in 5usize..25, seed in any::<u64>(), op in 0usize..4) {
        let inst = common::tsp(n, seed);
        let ps = PenaltyState::new(0.3);
        let cands = CandidateLists::build(&inst, CandidateLists::default_k(n)).unwrap();
        let ctx = EvalContext::new(&inst, &ps, &cands);
        let sol = initial_solution(&inst, seed);
        for m in neighbourhood(OperatorKind::ALL[op], &sol, &ctx, true) {
            prop_assert_eq!(m.delta_aug, m.delta_true);
        }
    }
}

#[test]
fn applying_best_moves_descends_to_local_minimum() {
    for seed in 0..10 {
        for inst in [common::tsp(40, seed), common::cvrp(40, seed)] {
            let ps = PenaltyState::new(0.3);
            let cands = CandidateLists::build(&inst, 10).unwrap();
            let mut sol = initial_solution(&inst, seed);
            let mut prev = sol.cost();
            loop {
                let ctx = EvalContext::new(&inst, &ps, &cands);
                let Some(m) = OperatorKind::ALL.iter().find_map(|&op| best_move(op, &sol, &ctx)) else { break };
                apply_move(&inst, &mut sol, &m).unwrap();
                assert!(sol.cost() < prev);
                prev = sol.cost();
            }
            assert!(validate(&inst, &sol).is_empty());
            assert!((sol.cost() - common::length(&inst, &sol)).abs() < 1e-9);
        }
    }
}

#[test]
fn cvrp_relocate_never_opens_routes() {
    for seed in 0..20 {
        let inst = common::cvrp(20, seed);
        let mut r = common::rng(seed);
        let ps = common::random_penalties(&inst, 0.3, &mut r);
        let cands = CandidateLists::build(&inst, 10).unwrap();
        let ctx = EvalContext::new(&inst, &ps, &cands);
        let sol = initial_solution(&inst, seed);
        let before = sol.as_routes().unwrap().num_routes();
        for m in neighbourhood(OperatorKind::Relocate, &sol, &ctx, true) {
            let mut s = sol.clone();
            apply_move(&inst, &mut s, &m).unwrap();
            let Solution::Routes(rs) = &s else { unreachable!() };
            assert!(rs.num_routes() <= before);
        }
    }
}
