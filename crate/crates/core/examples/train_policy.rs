//! Train a policy on random TSP20 instances, save it, and compare it against
//! uniform selection on held-out instances.
//!
//! cargo run --release --example train_policy [episodes]

use guided_routing::harness::{run_benchmark, BenchmarkSpec};
use guided_routing::search::{train, RewardVariant};
use guided_routing::{Policy, ProblemKind, SearchConfig};

fn main() -> guided_routing::Result<()> {
    let episodes = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let cfg = SearchConfig { max_steps: 1000, reward: RewardVariant::Advantage, record_events: false, ..Default::default() };
    let (policy, log) = train(ProblemKind::Tsp, 20, &cfg, episodes)?;
    for e in log.episodes.iter().step_by(5) {
        println!("episode {:>3}  best {:.4}  updates {}", e.episode, e.best_cost, e.updates);
    }

    let path = std::env::temp_dir().join("tsp20-policy.bin");
    policy.save(&path)?;
    let policy = Policy::load(&path)?;
    println!("saved {} parameters to {}", policy.num_params(), path.display());

    let spec = BenchmarkSpec { instances_per_size: 20, seed: 99, ..BenchmarkSpec::new(ProblemKind::Tsp, vec![20], cfg) };
    let trained = run_benchmark(&spec, Some(&policy))?;
    let uniform = run_benchmark(&spec, None)?;
    println!("held-out mean: trained {:.4}, uniform {:.4}", trained.rows[0].mean_cost, uniform.rows[0].mean_cost);
    Ok(())
}
