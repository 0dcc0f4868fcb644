use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use guided_routing::harness::{
    emit_report, generate_instance, instance_seed, published_best, run_ablation, run_benchmark,
    run_library_instance, BenchmarkSpec, Reference, ReportFormat,
};
use guided_routing::instance::parse_any;
use guided_routing::search::{train, train_policy, RewardVariant, UpdateCadence};
use guided_routing::{Error, Policy, ProblemKind, SearchConfig, Variant};

#[derive(Parser)]
#[command(name = "guided-routing", version, about = "Learned operator selection with guided local search for TSP and CVRP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random instances.
    Generate(GenerateArgs),
    /// Solve one instance file (TSPLIB, CVRPLIB or JSON).
    Solve(SolveArgs),
    /// Train a policy on random instances.
    Train(TrainArgs),
    /// Benchmark on generated instances.
    Bench(BenchArgs),
    /// Run all four variants on shared instances.
    Ablate(BenchArgs),
    /// Solve a library instance and report the gap to its best known tour.
    Tsplib(TsplibArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Tsp,
    Cvrp,
}

impl From<Kind> for ProblemKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Tsp => ProblemKind::Tsp,
            Kind::Cvrp => ProblemKind::Cvrp,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Total action steps (M).
    #[arg(long, default_value_t = 40_000)]
    steps: usize,
    /// Stall threshold (I).
    #[arg(long, default_value_t = 6)]
    stall: usize,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.3)]
    lambda: f64,
    #[arg(long, default_value = "l2gls")]
    variant: Variant,
    #[arg(long, default_value = "advantage")]
    reward: RewardVariant,
    /// Candidate-list length.
    #[arg(long)]
    k: Option<usize>,
    /// Policy checkpoint; uniform selection when absent.
    #[arg(long)]
    policy: Option<PathBuf>,
    /// Seconds per run.
    #[arg(long = "time-limit")]
    time_limit: Option<f64>,
    /// Training update schedule.
    #[arg(long, default_value = "episode")]
    cadence: UpdateCadence,
    /// Phases without a new best before stopping early; 0 disables.
    #[arg(long = "idle-phases", default_value_t = 0)]
    idle_phases: usize,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            max_steps: self.steps,
            stall_threshold: self.stall,
            epsilon: self.epsilon,
            lambda: self.lambda,
            reward: self.reward,
            variant: self.variant,
            candidate_k: self.k,
            seed: self.seed,
            time_limit: self.time_limit,
            max_idle_phases: (self.idle_phases > 0).then_some(self.idle_phases),
            update_cadence: self.cadence,
            ..SearchConfig::default()
        }
    }

    fn load_policy(&self) -> Result<Option<Policy>, Error> {
        self.policy.as_deref().map(Policy::load).transpose()
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum, default_value = "tsp")]
    kind: Kind,
    /// Nodes (customers for CVRP).
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; files are printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write JSON instead of TSPLIB text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[command(flatten)]
    search: SearchArgs,
    /// Solution file (JSON).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Event log (JSON lines).
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, value_enum, default_value = "tsp")]
    kind: Kind,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 50)]
    episodes: usize,
    #[command(flatten)]
    search: SearchArgs,
    /// Checkpoint path.
    #[arg(long)]
    out: PathBuf,
    /// Training log (JSON).
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "tsp")]
    kind: Kind,
    #[arg(long, value_delimiter = ',', default_values_t = vec![20])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    instances: usize,
    /// Held-Karp reference (TSP, at most 20 nodes).
    #[arg(long)]
    exact: bool,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Report zero timings so reruns are byte-identical.
    #[arg(long = "no-timing")]
    no_timing: bool,
}

impl BenchArgs {
    fn spec(&self) -> BenchmarkSpec {
        BenchmarkSpec {
            kind: self.kind.into(),
            sizes: self.sizes.clone(),
            instances_per_size: self.instances,
            seed: self.search.seed,
            config: SearchConfig { record_events: false, ..self.search.config() },
            reference: if self.exact { Reference::Exact } else { Reference::None },
            jobs: self.jobs,
            record_timing: !self.no_timing,
        }
    }
}

#[derive(Args)]
struct TsplibArgs {
    instance: PathBuf,
    #[command(flatten)]
    search: SearchArgs,
    /// Overrides the built-in best-known value.
    #[arg(long = "best-known")]
    best_known: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes)?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Generate(a) => {
            let kind = a.kind.into();
            if let Some(dir) = &a.out {
                fs::create_dir_all(dir)?;
            }
            for i in 0..a.count {
                let inst = generate_instance(kind, a.n, instance_seed(a.seed, a.n, i))?;
                let (text, ext) = if a.json {
                    (serde_json::to_string_pretty(&inst.to_file())? + "\n", "json")
                } else {
                    (inst.to_tsplib(), if kind == ProblemKind::Tsp { "tsp" } else { "vrp" })
                };
                match &a.out {
                    Some(dir) => fs::write(dir.join(format!("{}.{ext}", inst.name())), text)?,
                    None => print!("{text}"),
                }
            }
        }
        Command::Solve(a) => {
            let inst = parse_any(&fs::read(&a.instance)?)?;
            let policy = a.search.load_policy()?;
            let mut cfg = a.search.config();
            cfg.record_events = a.trace.is_some();
            let r = guided_routing::search::solve(&inst, &cfg, policy.as_ref())?;
            if let Some(p) = &a.trace {
                fs::write(p, r.events_jsonl())?;
            }
            if let Some(p) = &a.out {
                fs::write(p, serde_json::to_string_pretty(&r.best_solution.to_file(&inst))?)?;
            }
            let summary = json!({
                "instance": inst.name(),
                "best_cost": r.best_cost,
                "steps": r.steps_executed,
                "penalty_events": r.penalty_events,
                "seconds": r.wall_time,
            });
            println!("{summary}");
        }
        Command::Train(a) => {
            let cfg = SearchConfig { record_events: false, ..a.search.config() };
            let (policy, log) = match a.search.load_policy()? {
                Some(mut p) => {
                    let log = train_policy(&mut p, a.kind.into(), a.n, &cfg, a.episodes)?;
                    (p, log)
                }
                None => train(a.kind.into(), a.n, &cfg, a.episodes)?,
            };
            policy.save(&a.out)?;
            if let Some(p) = &a.log {
                fs::write(p, serde_json::to_string_pretty(&log)?)?;
            }
            let last = log.episodes.last().map(|e| e.best_cost);
            println!("{}", json!({ "episodes": log.episodes.len(), "last_best_cost": last, "checkpoint": a.out }));
        }
        Command::Bench(a) => {
            let policy = a.search.load_policy()?;
            let report = run_benchmark(&a.spec(), policy.as_ref())?;
            let format = match a.format {
                Format::Csv => ReportFormat::Csv,
                Format::Json => ReportFormat::Json,
            };
            write_out(a.out.as_deref(), &emit_report(&report, format)?)?;
        }
        Command::Ablate(a) => {
            let policy = a.search.load_policy()?;
            let table = run_ablation(&a.spec(), &[], policy.as_ref())?;
            let bytes = match a.format {
                Format::Csv => table.to_csv()?,
                Format::Json => serde_json::to_vec_pretty(&table)?,
            };
            write_out(a.out.as_deref(), &bytes)?;
        }
        Command::Tsplib(a) => {
            let inst = parse_any(&fs::read(&a.instance)?)?;
            let policy = a.search.load_policy()?;
            let cfg = SearchConfig { record_events: false, ..a.search.config() };
            let best = a.best_known.or_else(|| published_best(inst.name()));
            let outcome = run_library_instance(&inst, &cfg, policy.as_ref(), best)?;
            let mut text = serde_json::to_string(&outcome)?;
            text.push('\n');
            write_out(a.out.as_deref(), text.as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            let first = message.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("{}", json!({ "error": "usage", "message": first }));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::FAILURE
        }
    }
}
