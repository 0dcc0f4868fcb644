//! TSP20 benchmark against Held-Karp optima, emitted as CSV and JSON.
//!
//! cargo run --release --example benchmark_report

use guided_routing::harness::{emit_report, run_benchmark, BenchmarkSpec, Reference, ReportFormat};
use guided_routing::{ProblemKind, SearchConfig};

fn main() -> guided_routing::Result<()> {
    let cfg = SearchConfig { max_steps: 5000, record_events: false, ..Default::default() };
    let spec = BenchmarkSpec {
        instances_per_size: 20,
        reference: Reference::Exact,
        record_timing: false,
        ..BenchmarkSpec::new(ProblemKind::Tsp, vec![10, 15, 20], cfg)
    };
    let report = run_benchmark(&spec, None)?;
    print!("{}", String::from_utf8_lossy(&emit_report(&report, ReportFormat::Csv)?));
    let worst = report.records.iter().filter_map(|r| r.gap_pct).fold(0.0, f64::max);
    println!("worst per-instance gap {worst:.3}%");
    let json = emit_report(&report, ReportFormat::Json)?;
    println!("JSON report: {} bytes, {} records", json.len(), report.records.len());
    Ok(())
}
