//! The four operators' best moves on a random tour and on a random route
//! set, with true and augmented deltas.
//!
//! cargo run --example operator_moves

use guided_routing::instance::{generate_cvrp, generate_uniform_tsp};
use guided_routing::operators::{apply_move, best_move, neighbourhood};
use guided_routing::solution::{initial_solution, validate};
use guided_routing::{CandidateLists, EvalContext, GenSpec, OperatorKind, PenaltyState};

fn main() -> guided_routing::Result<()> {
    let tsp = generate_uniform_tsp(15, 5)?.normalize()?;
    let cvrp = generate_cvrp(&GenSpec::uniform(15, 5))?.normalize()?;
    for inst in [tsp, cvrp] {
        let cands = CandidateLists::build(&inst, CandidateLists::default_k(inst.len()))?;
        let mut ps = PenaltyState::new(0.3);
        ps.set(1, 2, 2);
        let sol = initial_solution(&inst, 5);
        let ctx = EvalContext::new(&inst, &ps, &cands);
        println!("{} (cost {:.4})", inst.name(), sol.cost());
        for op in OperatorKind::ALL {
            let size = neighbourhood(op, &sol, &ctx, true).len();
            match best_move(op, &sol, &ctx) {
                Some(m) => {
                    let mut next = sol.clone();
                    apply_move(&inst, &mut next, &m)?;
                    println!(
                        "  {:<10} {:>4} moves  best {:?}  delta_true {:+.4}  delta_aug {:+.4}  feasible {}",
                        op.name(),
                        size,
                        m.params,
                        m.delta_true,
                        m.delta_aug,
                        validate(&inst, &next).is_empty()
                    );
                }
                None => println!("  {:<10} {:>4} moves  no improving move", op.name(), size),
            }
        }
    }
    Ok(())
}
