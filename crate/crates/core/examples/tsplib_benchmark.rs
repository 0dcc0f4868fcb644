//! Gap to the published best tours on the bundled TSPLIB instances.
//!
//! cargo run --release --example tsplib_benchmark

use guided_routing::harness::{published_best, run_library_instance};
use guided_routing::instance::parse_any;
use guided_routing::SearchConfig;

fn main() -> guided_routing::Result<()> {
    let files: [(&str, &[u8]); 3] = [
        ("eil51", include_bytes!("../data/eil51.tsp")),
        ("berlin52", include_bytes!("../data/berlin52.tsp")),
        ("pr76", include_bytes!("../data/pr76.tsp")),
    ];
    println!("{:<10} {:>10} {:>10} {:>8} {:>7}", "instance", "cost", "best", "gap %", "secs");
    for (name, bytes) in files {
        let inst = parse_any(bytes)?;
        let cfg = SearchConfig { time_limit: Some(300.0), record_events: false, ..Default::default() };
        let o = run_library_instance(&inst, &cfg, None, published_best(name))?;
        println!(
            "{:<10} {:>10} {:>10} {:>8.2} {:>7.2}",
            o.name,
            o.best_cost,
            o.best_known.unwrap_or(f64::NAN),
            o.gap_pct.unwrap_or(f64::NAN),
            o.seconds
        );
    }
    Ok(())
}
