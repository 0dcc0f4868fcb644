//! The four variants on shared TSP instances.
//!
//! cargo run --release --example ablation [instances]

use guided_routing::harness::{run_ablation, BenchmarkSpec};
use guided_routing::{ProblemKind, SearchConfig};

fn main() -> guided_routing::Result<()> {
    let per = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let cfg = SearchConfig { max_steps: 5000, record_events: false, ..Default::default() };
    let spec = BenchmarkSpec { instances_per_size: per, ..BenchmarkSpec::new(ProblemKind::Tsp, vec![20, 50], cfg) };
    let table = run_ablation(&spec, &[], None)?;
    print!("{}", String::from_utf8_lossy(&table.to_csv()?));
    Ok(())
}
