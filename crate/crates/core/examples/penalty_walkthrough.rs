//! One guided-local-search step by hand: descend to a local minimum, look at
//! edge utilities, penalize, and watch the augmented cost change.
//!
//! cargo run --example penalty_walkthrough

use guided_routing::gls::{augmented_cost, feature_utility, penalize};
use guided_routing::instance::generate_uniform_tsp;
use guided_routing::operators::{apply_move, best_move};
use guided_routing::solution::initial_solution;
use guided_routing::{CandidateLists, EvalContext, Feature, OperatorKind, PenaltyState};

fn main() -> guided_routing::Result<()> {
    let inst = generate_uniform_tsp(12, 3)?.normalize()?;
    let cands = CandidateLists::build(&inst, 6)?;
    let mut ps = PenaltyState::new(0.3);
    let mut sol = initial_solution(&inst, 1);
    println!("start L = {:.4}", sol.cost());

    for round in 0..3 {
        // plain descent on h until no operator improves
        loop {
            let ctx = EvalContext::new(&inst, &ps, &cands);
            let Some(m) = OperatorKind::ALL.iter().find_map(|&op| best_move(op, &sol, &ctx)) else { break };
            apply_move(&inst, &mut sol, &m)?;
        }
        println!("\nround {round}: local minimum L = {:.4}, h = {:.4}", sol.cost(), augmented_cost(&sol, &ps));
        let mut utils: Vec<(f64, (usize, usize))> = sol
            .edges()
            .into_iter()
            .map(|(a, b)| (feature_utility(&sol, &ps, &Feature::new(&inst, a, b)), (a.min(b), a.max(b))))
            .collect();
        utils.sort_by(|x, y| y.0.total_cmp(&x.0));
        for (u, e) in utils.iter().take(3) {
            println!("  edge {e:?}  d = {:.4}  p = {}  utility {u:.4}", inst.dist(e.0, e.1), ps.get(e.0, e.1));
        }
        let hit = penalize(&inst, &sol, &mut ps);
        println!("  penalized {:?}; h is now {:.4}", hit.iter().map(|f| f.edge).collect::<Vec<_>>(), augmented_cost(&sol, &ps));
    }
    Ok(())
}
