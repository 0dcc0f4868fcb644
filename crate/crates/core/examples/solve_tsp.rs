//! Solve a TSP with uniform operator selection and print the best-cost trace.
//!
//! cargo run --release --example solve_tsp [path/to/instance.tsp]

use guided_routing::instance::{generate_uniform_tsp, parse_any};
use guided_routing::search::solve;
use guided_routing::SearchConfig;

fn main() -> guided_routing::Result<()> {
    let inst = match std::env::args().nth(1) {
        Some(path) => parse_any(&std::fs::read(path)?)?,
        None => generate_uniform_tsp(100, 7)?,
    };
    let cfg = SearchConfig { max_steps: 20_000, trace_every: 2000, record_events: false, ..Default::default() };
    let r = solve(&inst, &cfg, None)?;
    println!("{}: {} nodes", inst.name(), inst.len());
    for t in &r.trace {
        println!("step {:>6}  current {:.4}  best {:.4}", t.step, t.current, t.best);
    }
    println!(
        "best {:.4} after {} steps, {} penalty phases, {:.2}s",
        r.best_cost, r.steps_executed, r.penalty_events, r.wall_time
    );
    println!("tour {:?}", r.best_solution.as_tour().map(|t| t.order()).unwrap_or_default());
    Ok(())
}
