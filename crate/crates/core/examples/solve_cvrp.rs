//! Solve the bundled eil22 CVRP and print the routes with their loads.
//!
//! cargo run --release --example solve_cvrp

use guided_routing::instance::parse_any;
use guided_routing::search::solve;
use guided_routing::SearchConfig;

fn main() -> guided_routing::Result<()> {
    let inst = parse_any(include_bytes!("../data/eil22.vrp"))?;
    let cfg = SearchConfig { max_steps: 20_000, record_events: false, ..Default::default() };
    let r = solve(&inst, &cfg, None)?;
    let routes = r.best_solution.as_routes().expect("CVRP solution");
    println!("{}: cost {} (optimum 375), {} routes", inst.name(), r.best_cost, routes.num_routes());
    for (route, load) in routes.routes().iter().zip(routes.loads()) {
        println!("  load {load:>5}/{}  0 -> {:?} -> 0", inst.capacity(), route);
    }
    Ok(())
}
