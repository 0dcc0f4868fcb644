//! Benchmarks, ablations and reports.
//!
//! Instances are generated from a master seed split per size and per
//! instance, so reruns and variants see identical instance sets. Solves run
//! on a bounded rayon pool; results come back in instance order, which keeps
//! reports byte-identical across runs when timing is not recorded.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{generate_cvrp, generate_uniform_tsp, GenSpec, ProblemKind, RoutingInstance};
use crate::policy::Policy;
use crate::rng::split_seed;
use crate::search::{solve, SearchConfig, Variant};

/// Largest instance the exact solver accepts.
pub const EXACT_MAX_NODES: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("exact solver handles at most {max} nodes, got {n}")]
    SizeLimit { n: usize, max: usize },
    #[error("exact solver needs a TSP instance")]
    NotTsp,
    #[error("invalid benchmark spec: {0}")]
    InvalidSpec(String),
    #[error("report error: {0}")]
    Report(String),
}

/// Held-Karp dynamic program. Returns the optimal cost and a tour starting
/// at node 0.
pub fn exact_tsp(inst: &RoutingInstance) -> Result<(f64, Vec<usize>), HarnessError> {
    let n = inst.len();
    if inst.kind() != ProblemKind::Tsp {
        return Err(HarnessError::NotTsp);
    }
    if n > EXACT_MAX_NODES {
        return Err(HarnessError::SizeLimit { n, max: EXACT_MAX_NODES });
    }
    // node 0 is fixed as the start; bit b of a mask stands for node b + 1
    let m = n - 1;
    let full = (1usize << m) - 1;
    let d = |i: usize, j: usize| inst.dist(i, j);
    let mut dp = vec![f64::INFINITY; (full + 1) * m];
    let mut parent = vec![u8::MAX; (full + 1) * m];
    for j in 0..m {
        dp[(1 << j) * m + j] = d(0, j + 1);
    }
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut bits = mask;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let prev = mask ^ (1 << j);
            let row = &dp[prev * m..prev * m + m];
            let mut best = f64::INFINITY;
            let mut arg = u8::MAX;
            let mut rest = prev;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let c = row[i] + d(i + 1, j + 1);
                if c < best {
                    best = c;
                    arg = i as u8;
                }
            }
            dp[mask * m + j] = best;
            parent[mask * m + j] = arg;
        }
    }
    let (mut last, mut best) = (0, f64::INFINITY);
    for j in 0..m {
        let c = dp[full * m + j] + d(j + 1, 0);
        if c < best {
            best = c;
            last = j;
        }
    }
    let mut tour = Vec::with_capacity(n);
    let mut mask = full;
    let mut j = last;
    loop {
        tour.push(j + 1);
        let p = parent[mask * m + j];
        mask ^= 1 << j;
        if p == u8::MAX {
            break;
        }
        j = p as usize;
    }
    tour.push(0);
    tour.reverse();
    Ok((best, tour))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "values", rename_all = "snake_case")]
pub enum Reference {
    None,
    /// Held-Karp optimum per instance (TSP, at most 20 nodes).
    Exact,
    /// Known costs by instance name.
    Known(BTreeMap<String, f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub kind: ProblemKind,
    /// Node counts (customers for CVRP).
    pub sizes: Vec<usize>,
    pub instances_per_size: usize,
    pub seed: u64,
    pub config: SearchConfig,
    pub reference: Reference,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    /// When false all timings are reported as 0 so reports are reproducible
    /// byte for byte.
    pub record_timing: bool,
}

impl BenchmarkSpec {
    /// 100 instances per size, no reference, timing recorded.
    pub fn new(kind: ProblemKind, sizes: Vec<usize>, config: SearchConfig) -> Self {
        BenchmarkSpec {
            kind,
            sizes,
            instances_per_size: 100,
            seed: 0,
            config,
            reference: Reference::None,
            jobs: 0,
            record_timing: true,
        }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        if self.instances_per_size == 0 {
            return Err(HarnessError::InvalidSpec("instances_per_size must be positive".into()));
        }
        if self.sizes.is_empty() {
            return Err(HarnessError::InvalidSpec("no sizes given".into()));
        }
        if self.reference == Reference::Exact {
            if self.kind != ProblemKind::Tsp {
                return Err(HarnessError::InvalidSpec("exact reference is TSP only".into()));
            }
            if let Some(&n) = self.sizes.iter().find(|&&n| n > EXACT_MAX_NODES) {
                return Err(HarnessError::SizeLimit { n, max: EXACT_MAX_NODES });
            }
        }
        Ok(())
    }
}

/// Seed of instance `index` of size `size`.
pub fn instance_seed(master: u64, size: usize, index: usize) -> u64 {
    split_seed(split_seed(master, size as u64), index as u64)
}

pub fn generate_instance(kind: ProblemKind, size: usize, seed: u64) -> Result<RoutingInstance, crate::Error> {
    Ok(match kind {
        ProblemKind::Tsp => generate_uniform_tsp(size, seed)?,
        ProblemKind::Cvrp => generate_cvrp(&GenSpec::uniform(size, seed))?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub size: usize,
    pub index: usize,
    pub name: String,
    pub instance_seed: u64,
    pub best_cost: Option<f64>,
    pub reference: Option<f64>,
    pub gap_pct: Option<f64>,
    pub seconds: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub size: usize,
    pub mean_cost: f64,
    pub std_cost: f64,
    /// `100 * (mean cost - mean reference) / mean reference`.
    pub gap_pct: Option<f64>,
    pub mean_seconds: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub rows: Vec<ReportRow>,
    pub records: Vec<InstanceRecord>,
    pub failures: usize,
    pub total_seconds: f64,
}

/// Arithmetic mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn gap_pct(cost: f64, reference: f64) -> f64 {
    100.0 * (cost - reference) / reference
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Generates, solves and aggregates every instance of the spec. Per-instance
/// failures are recorded rather than aborting the run.
pub fn run_benchmark(spec: &BenchmarkSpec, policy: Option<&Policy>) -> Result<BenchmarkReport, HarnessError> {
    spec.validate()?;
    let started = std::time::Instant::now();
    let tasks: Vec<(usize, usize)> =
        spec.sizes.iter().flat_map(|&s| (0..spec.instances_per_size).map(move |i| (s, i))).collect();
    let records: Vec<InstanceRecord> =
        with_pool(spec.jobs, || tasks.par_iter().map(|&(size, index)| run_one(spec, policy, size, index)).collect());
    let rows = spec
        .sizes
        .iter()
        .map(|&size| {
            let ok: Vec<&InstanceRecord> =
                records.iter().filter(|r| r.size == size && r.best_cost.is_some()).collect();
            let costs: Vec<f64> = ok.iter().filter_map(|r| r.best_cost).collect();
            let (mean_cost, std_cost) = mean_std(&costs);
            let refs: Vec<(f64, f64)> = ok.iter().filter_map(|r| Some((r.best_cost?, r.reference?))).collect();
            let gap = (!refs.is_empty()).then(|| {
                let mc = refs.iter().map(|p| p.0).sum::<f64>() / refs.len() as f64;
                let mr = refs.iter().map(|p| p.1).sum::<f64>() / refs.len() as f64;
                gap_pct(mc, mr)
            });
            let mean_seconds = ok.iter().map(|r| r.seconds).sum::<f64>() / ok.len().max(1) as f64;
            ReportRow { size, mean_cost, std_cost, gap_pct: gap, mean_seconds, count: ok.len() }
        })
        .collect();
    let failures = records.iter().filter(|r| r.error.is_some()).count();
    let total_seconds = if spec.record_timing { started.elapsed().as_secs_f64() } else { 0.0 };
    Ok(BenchmarkReport { rows, records, failures, total_seconds })
}

fn run_one(spec: &BenchmarkSpec, policy: Option<&Policy>, size: usize, index: usize) -> InstanceRecord {
    let seed = instance_seed(spec.seed, size, index);
    let mut rec = InstanceRecord {
        size,
        index,
        name: String::new(),
        instance_seed: seed,
        best_cost: None,
        reference: None,
        gap_pct: None,
        seconds: 0.0,
        error: None,
    };
    let inst = match generate_instance(spec.kind, size, seed) {
        Ok(i) => i,
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    rec.name = inst.name().to_string();
    let cfg = SearchConfig { seed: split_seed(seed, 1), record_events: false, ..spec.config.clone() };
    match solve(&inst, &cfg, policy) {
        Ok(r) => {
            rec.best_cost = Some(r.best_cost);
            if spec.record_timing {
                rec.seconds = r.wall_time;
            }
        }
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    }
    rec.reference = match &spec.reference {
        Reference::None => None,
        Reference::Exact => exact_tsp(&inst).ok().map(|(c, _)| c),
        Reference::Known(map) => map.get(inst.name()).copied(),
    };
    rec.gap_pct = rec.best_cost.zip(rec.reference).map(|(c, r)| gap_pct(c, r));
    rec
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(HarnessError::InvalidSpec(format!("unknown format {other:?}"))),
        }
    }
}

pub const CSV_HEADER: [&str; 6] = ["size", "mean_cost", "std_cost", "gap_pct", "mean_seconds", "count"];

/// Serializes the per-size rows (CSV) or the whole report (JSON).
pub fn emit_report(report: &BenchmarkReport, format: ReportFormat) -> Result<Vec<u8>, HarnessError> {
    let err = |e: &dyn std::fmt::Display| HarnessError::Report(e.to_string());
    match format {
        ReportFormat::Json => serde_json::to_vec_pretty(report).map_err(|e| err(&e)),
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER).map_err(|e| err(&e))?;
            for r in &report.rows {
                w.write_record([
                    r.size.to_string(),
                    r.mean_cost.to_string(),
                    r.std_cost.to_string(),
                    r.gap_pct.map(|g| g.to_string()).unwrap_or_default(),
                    r.mean_seconds.to_string(),
                    r.count.to_string(),
                ])
                .map_err(|e| err(&e))?;
            }
            w.into_inner().map_err(|e| err(&e))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub variant: Variant,
    /// Mean best cost per size, in `sizes` order.
    pub means: Vec<f64>,
    /// Per-instance best costs per size (failures as NaN).
    pub costs: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationTable {
    pub sizes: Vec<usize>,
    pub rows: Vec<AblationRow>,
}

impl AblationTable {
    pub fn row(&self, v: Variant) -> Option<&AblationRow> {
        self.rows.iter().find(|r| r.variant == v)
    }

    /// `variant,<size>,...` with one line per variant.
    pub fn to_csv(&self) -> Result<Vec<u8>, HarnessError> {
        let err = |e: csv::Error| HarnessError::Report(e.to_string());
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["variant".to_string()];
        header.extend(self.sizes.iter().map(|s| s.to_string()));
        w.write_record(&header).map_err(err)?;
        for r in &self.rows {
            let mut line = vec![r.variant.name().to_string()];
            line.extend(r.means.iter().map(|m| m.to_string()));
            w.write_record(&line).map_err(err)?;
        }
        w.into_inner().map_err(|e| HarnessError::Report(e.to_string()))
    }
}

/// Runs `variants` (all four by default) on identical instance sets.
pub fn run_ablation(
    spec: &BenchmarkSpec,
    variants: &[Variant],
    policy: Option<&Policy>,
) -> Result<AblationTable, HarnessError> {
    let variants = if variants.is_empty() { &Variant::ALL[..] } else { variants };
    let mut rows = Vec::with_capacity(variants.len());
    for &variant in variants {
        let vspec = BenchmarkSpec {
            config: SearchConfig { variant, ..spec.config.clone() },
            reference: Reference::None,
            ..spec.clone()
        };
        let report = run_benchmark(&vspec, policy)?;
        let costs: Vec<Vec<f64>> = spec
            .sizes
            .iter()
            .map(|&s| {
                report.records.iter().filter(|r| r.size == s).map(|r| r.best_cost.unwrap_or(f64::NAN)).collect()
            })
            .collect();
        rows.push(AblationRow { variant, means: report.rows.iter().map(|r| r.mean_cost).collect(), costs });
    }
    Ok(AblationTable { sizes: spec.sizes.clone(), rows })
}

/// Best tour lengths commonly quoted for the bundled library instances.
/// eil51 is quoted as 428 although the proven optimum is 426.
pub fn published_best(name: &str) -> Option<f64> {
    match name.to_ascii_lowercase().as_str() {
        "eil51" => Some(428.0),
        "pr76" => Some(108_159.0),
        "berlin52" => Some(7542.0),
        _ => None,
    }
}

/// Outcome of solving one benchmark-library instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LibraryOutcome {
    pub name: String,
    pub nodes: usize,
    pub best_cost: f64,
    pub best_known: Option<f64>,
    pub gap_pct: Option<f64>,
    pub seconds: f64,
    pub steps: usize,
}

pub fn run_library_instance(
    inst: &RoutingInstance,
    config: &SearchConfig,
    policy: Option<&Policy>,
    best_known: Option<f64>,
) -> Result<LibraryOutcome, crate::Error> {
    let r = solve(inst, config, policy)?;
    Ok(LibraryOutcome {
        name: inst.name().to_string(),
        nodes: inst.len(),
        best_cost: r.best_cost,
        best_known,
        gap_pct: best_known.map(|b| gap_pct(r.best_cost, b)),
        seconds: r.wall_time,
        steps: r.steps_executed,
    })
}
