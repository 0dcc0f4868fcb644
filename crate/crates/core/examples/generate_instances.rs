//! Random TSP and CVRP instances in both on-disk formats.
//!
//! cargo run --example generate_instances

use guided_routing::instance::{generate_cvrp, generate_uniform_tsp, CustomerMode, DepotMode};
use guided_routing::{GenSpec, RoutingInstance};

fn main() -> guided_routing::Result<()> {
    let tsp = generate_uniform_tsp(8, 1)?;
    print!("{}", tsp.to_tsplib());

    let spec = GenSpec { customer_mode: CustomerMode::Clustered, depot_mode: DepotMode::Eccentric, ..GenSpec::uniform(10, 2) };
    let cvrp = generate_cvrp(&spec)?;
    println!("{}", serde_json::to_string_pretty(&cvrp.to_file())?);

    // both formats parse back to the same instance
    let again = guided_routing::instance::parse_any(cvrp.to_tsplib().as_bytes())?;
    assert_eq!(again.demands(), cvrp.demands());
    let from_json = RoutingInstance::from_file(cvrp.to_file())?;
    assert_eq!(from_json, cvrp);
    println!("total demand {} over capacity {}", cvrp.demands().iter().sum::<u32>(), cvrp.capacity());
    Ok(())
}
