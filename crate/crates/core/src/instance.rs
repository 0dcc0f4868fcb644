//! Problem instances: TSP tours over planar points and single-depot CVRP.
//!
//! Node ids are dense and zero-based. For CVRP the depot is always node 0 and
//! customers are `1..n`; parsed files whose depot is declared elsewhere are
//! re-indexed on load.
//!
//! Distances are precomputed into a dense matrix at construction. Two
//! distance conventions are supported: plain Euclidean on reals (generated
//! instances) and the TSPLIB `EUC_2D` convention of rounding to the nearest
//! integer (benchmark files).

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("invalid size: {kind:?} instance needs at least {min} nodes, got {n}")]
    InvalidSize { kind: ProblemKind, n: usize, min: usize },
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("unsupported format: {keyword} = {value}")]
    UnsupportedFormat { keyword: String, value: String },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing section {0}")]
    MissingSection(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("node index {index} out of range for {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("degenerate instance: all nodes coincide")]
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Tsp,
    Cvrp,
}

impl std::str::FromStr for ProblemKind {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tsp" => Ok(ProblemKind::Tsp),
            "cvrp" => Ok(ProblemKind::Cvrp),
            other => Err(InstanceError::InvalidSpec(format!("unknown problem kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    EuclidReal,
    /// Nearest-integer Euclidean (`nint`), the TSPLIB `EUC_2D` rule.
    EuclidRounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepotMode {
    /// Depot at (0.5, 0.5).
    Central,
    /// Depot in the corner, (0, 0).
    Eccentric,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CustomerMode {
    Random,
    Clustered,
    RandomClustered,
}

/// Parameters for [`generate_cvrp`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    /// Number of customers; the instance has `n + 1` nodes.
    pub n: usize,
    pub seed: u64,
    pub depot_mode: DepotMode,
    pub customer_mode: CustomerMode,
    pub capacity: u32,
    /// Inclusive demand interval.
    pub demand_range: (u32, u32),
}

impl GenSpec {
    /// Uniform depot and customers, demands in `1..=9`, capacity from
    /// [`default_capacity`].
    pub fn uniform(n: usize, seed: u64) -> Self {
        GenSpec {
            n,
            seed,
            depot_mode: DepotMode::Random,
            customer_mode: CustomerMode::Random,
            capacity: default_capacity(n),
            demand_range: (1, 9),
        }
    }
}

/// Vehicle capacity used for random CVRP of `n` customers: 20, 30 and 40 for
/// 20, 50 and 100 customers, 50 for anything larger.
pub fn default_capacity(n: usize) -> u32 {
    match n {
        0..=20 => 20,
        21..=50 => 30,
        51..=100 => 40,
        _ => 50,
    }
}

/// Number of cluster seeds for the clustered customer layout is drawn from
/// this range.
const CLUSTER_SEEDS: std::ops::RangeInclusive<usize> = 3..=8;
/// Per-axis standard deviation of a customer around its cluster seed.
const CLUSTER_SIGMA: f64 = 0.07;

#[derive(Debug, Clone)]
pub struct RoutingInstance {
    kind: ProblemKind,
    name: String,
    /// Working coordinates (unit square after [`RoutingInstance::normalize`]).
    coords: Vec<[f64; 2]>,
    /// Coordinates as read or generated, before normalization.
    raw_coords: Vec<[f64; 2]>,
    demands: Vec<u32>,
    capacity: u32,
    distance_mode: DistanceMode,
    scale: f64,
    dist: Vec<f64>,
}

impl PartialEq for RoutingInstance {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.name == other.name
            && self.coords == other.coords
            && self.raw_coords == other.raw_coords
            && self.demands == other.demands
            && self.capacity == other.capacity
            && self.distance_mode == other.distance_mode
            && self.scale == other.scale
    }
}

fn euclid(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn nint(x: f64) -> f64 {
    (x + 0.5).floor()
}

impl RoutingInstance {
    pub fn tsp(
        name: impl Into<String>,
        coords: Vec<[f64; 2]>,
        mode: DistanceMode,
    ) -> Result<Self, InstanceError> {
        if coords.len() < 3 {
            return Err(InstanceError::InvalidSize { kind: ProblemKind::Tsp, n: coords.len(), min: 3 });
        }
        Self::build(ProblemKind::Tsp, name.into(), coords, Vec::new(), 0, mode)
    }

    /// `coords[0]` and `demands[0]` belong to the depot.
    pub fn cvrp(
        name: impl Into<String>,
        coords: Vec<[f64; 2]>,
        demands: Vec<u32>,
        capacity: u32,
        mode: DistanceMode,
    ) -> Result<Self, InstanceError> {
        if coords.len() < 3 {
            return Err(InstanceError::InvalidSize { kind: ProblemKind::Cvrp, n: coords.len(), min: 3 });
        }
        if demands.len() != coords.len() {
            return Err(InstanceError::Validation(format!(
                "{} demands for {} nodes",
                demands.len(),
                coords.len()
            )));
        }
        if capacity == 0 {
            return Err(InstanceError::Validation("capacity must be positive".into()));
        }
        if demands[0] != 0 {
            return Err(InstanceError::Validation(format!("depot demand is {}, expected 0", demands[0])));
        }
        if let Some((i, g)) = demands.iter().enumerate().skip(1).find(|(_, &g)| g == 0 || g > capacity) {
            return Err(InstanceError::Validation(format!(
                "customer {i} has demand {g}, expected 1..={capacity}"
            )));
        }
        Self::build(ProblemKind::Cvrp, name.into(), coords, demands, capacity, mode)
    }

    fn build(
        kind: ProblemKind,
        name: String,
        coords: Vec<[f64; 2]>,
        demands: Vec<u32>,
        capacity: u32,
        distance_mode: DistanceMode,
    ) -> Result<Self, InstanceError> {
        if let Some(i) = coords.iter().position(|c| !c[0].is_finite() || !c[1].is_finite()) {
            return Err(InstanceError::Validation(format!("node {i} has non-finite coordinates")));
        }
        let mut inst = RoutingInstance {
            kind,
            name,
            raw_coords: coords.clone(),
            coords,
            demands,
            capacity,
            distance_mode,
            scale: 1.0,
            dist: Vec::new(),
        };
        inst.fill_distances();
        Ok(inst)
    }

    fn fill_distances(&mut self) {
        let n = self.coords.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = match self.distance_mode {
                    DistanceMode::EuclidReal => euclid(self.coords[i], self.coords[j]),
                    DistanceMode::EuclidRounded => {
                        nint(euclid(self.raw_coords[i], self.raw_coords[j])) / self.scale
                    }
                };
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        self.dist = dist;
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Total node count, depot included.
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_cvrp(&self) -> bool {
        self.kind == ProblemKind::Cvrp
    }

    pub fn num_customers(&self) -> usize {
        match self.kind {
            ProblemKind::Tsp => self.len(),
            ProblemKind::Cvrp => self.len() - 1,
        }
    }

    /// Nodes that operators may move: every node for TSP, customers for CVRP.
    pub fn movable_nodes(&self) -> std::ops::Range<usize> {
        match self.kind {
            ProblemKind::Tsp => 0..self.len(),
            ProblemKind::Cvrp => 1..self.len(),
        }
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn raw_coords(&self) -> &[[f64; 2]] {
        &self.raw_coords
    }

    /// Per-node demands; empty for TSP.
    pub fn demands(&self) -> &[u32] {
        &self.demands
    }

    pub fn demand(&self, i: usize) -> u32 {
        self.demands.get(i).copied().unwrap_or(0)
    }

    /// Vehicle capacity; 0 for TSP.
    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn distance_mode(&self) -> DistanceMode {
        self.distance_mode
    }

    /// Multiplier from working units back to raw units.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Checked distance lookup.
    pub fn distance(&self, i: usize, j: usize) -> Result<f64, InstanceError> {
        let n = self.len();
        for index in [i, j] {
            if index >= n {
                return Err(InstanceError::IndexOutOfRange { index, n });
            }
        }
        Ok(self.dist(i, j))
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.coords.len() + j]
    }

    /// Length of edge `(i, j)` in raw units: the integer `nint` length for
    /// rounded instances, `scale * dist` otherwise.
    pub fn raw_edge_length(&self, i: usize, j: usize) -> f64 {
        match self.distance_mode {
            DistanceMode::EuclidRounded => nint(euclid(self.raw_coords[i], self.raw_coords[j])),
            DistanceMode::EuclidReal => self.scale * self.dist(i, j),
        }
    }

    /// Maps the working coordinates into the unit square, preserving aspect
    /// ratio. Instances already inside `[0,1]^2` are returned unchanged.
    pub fn normalize(&self) -> Result<RoutingInstance, InstanceError> {
        let first = *self.coords.first().ok_or(InstanceError::Degenerate)?;
        let (mut lo, mut hi) = (first, first);
        for c in &self.coords {
            lo = [lo[0].min(c[0]), lo[1].min(c[1])];
            hi = [hi[0].max(c[0]), hi[1].max(c[1])];
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        if span <= 0.0 {
            return Err(InstanceError::Degenerate);
        }
        if lo[0] >= 0.0 && lo[1] >= 0.0 && hi[0] <= 1.0 && hi[1] <= 1.0 {
            return Ok(self.clone());
        }
        let mut out = self.clone();
        out.coords = self
            .coords
            .iter()
            .map(|c| [(c[0] - lo[0]) / span, (c[1] - lo[1]) / span])
            .collect();
        out.scale = self.scale * span;
        out.fill_distances();
        Ok(out)
    }

    /// Writes the instance in TSPLIB (TSP) or CVRPLIB (CVRP) text form using
    /// the raw coordinates.
    pub fn to_tsplib(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "NAME : {}", self.name);
        let _ = writeln!(out, "TYPE : {}", if self.is_cvrp() { "CVRP" } else { "TSP" });
        let _ = writeln!(out, "DIMENSION : {}", self.len());
        let _ = writeln!(out, "EDGE_WEIGHT_TYPE : EUC_2D");
        if self.is_cvrp() {
            let _ = writeln!(out, "CAPACITY : {}", self.capacity);
        }
        let _ = writeln!(out, "NODE_COORD_SECTION");
        for (i, c) in self.raw_coords.iter().enumerate() {
            let _ = writeln!(out, "{} {} {}", i + 1, c[0], c[1]);
        }
        if self.is_cvrp() {
            let _ = writeln!(out, "DEMAND_SECTION");
            for (i, g) in self.demands.iter().enumerate() {
                let _ = writeln!(out, "{} {}", i + 1, g);
            }
            let _ = writeln!(out, "DEPOT_SECTION\n1\n-1");
        }
        out.push_str("EOF\n");
        out
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            kind: self.kind,
            name: self.name.clone(),
            coords: self.raw_coords.clone(),
            demands: self.demands.clone(),
            capacity: self.capacity,
            distance_mode: self.distance_mode,
        }
    }

    pub fn from_file(file: InstanceFile) -> Result<Self, InstanceError> {
        match file.kind {
            ProblemKind::Tsp => Self::tsp(file.name, file.coords, file.distance_mode),
            ProblemKind::Cvrp => {
                Self::cvrp(file.name, file.coords, file.demands, file.capacity, file.distance_mode)
            }
        }
    }
}

/// JSON instance format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub kind: ProblemKind,
    pub name: String,
    pub coords: Vec<[f64; 2]>,
    #[serde(default)]
    pub demands: Vec<u32>,
    #[serde(default)]
    pub capacity: u32,
    pub distance_mode: DistanceMode,
}

/// `n` points i.i.d. uniform in the unit square.
pub fn generate_uniform_tsp(n: usize, seed: u64) -> Result<RoutingInstance, InstanceError> {
    if n < 3 {
        return Err(InstanceError::InvalidSize { kind: ProblemKind::Tsp, n, min: 3 });
    }
    let mut rng = rng_from_seed(seed);
    let coords = (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
    RoutingInstance::tsp(format!("tsp{n}-{seed}"), coords, DistanceMode::EuclidReal)
}

pub fn generate_cvrp(spec: &GenSpec) -> Result<RoutingInstance, InstanceError> {
    let (lo, hi) = spec.demand_range;
    if spec.n < 2 {
        return Err(InstanceError::InvalidSize { kind: ProblemKind::Cvrp, n: spec.n + 1, min: 3 });
    }
    if spec.capacity == 0 {
        return Err(InstanceError::InvalidSpec("capacity must be positive".into()));
    }
    if lo == 0 || lo > hi || hi > spec.capacity {
        return Err(InstanceError::InvalidSpec(format!(
            "demand range {lo}..={hi} must lie within 1..={}",
            spec.capacity
        )));
    }
    let mut rng = rng_from_seed(spec.seed);
    let depot = match spec.depot_mode {
        DepotMode::Central => [0.5, 0.5],
        DepotMode::Eccentric => [0.0, 0.0],
        DepotMode::Random => [rng.random::<f64>(), rng.random::<f64>()],
    };
    let customers = match spec.customer_mode {
        CustomerMode::Random => uniform_points(&mut rng, spec.n),
        CustomerMode::Clustered => clustered_points(&mut rng, spec.n),
        CustomerMode::RandomClustered => {
            let random = spec.n / 2;
            let mut pts = uniform_points(&mut rng, random);
            pts.extend(clustered_points(&mut rng, spec.n - random));
            pts
        }
    };
    let mut coords = Vec::with_capacity(spec.n + 1);
    coords.push(depot);
    coords.extend(customers);
    let mut demands = Vec::with_capacity(spec.n + 1);
    demands.push(0);
    demands.extend((0..spec.n).map(|_| rng.random_range(lo..=hi)));
    RoutingInstance::cvrp(
        format!("cvrp{}-{}", spec.n, spec.seed),
        coords,
        demands,
        spec.capacity,
        DistanceMode::EuclidReal,
    )
}

fn uniform_points<R: Rng>(rng: &mut R, n: usize) -> Vec<[f64; 2]> {
    (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect()
}

fn clustered_points<R: Rng>(rng: &mut R, n: usize) -> Vec<[f64; 2]> {
    if n == 0 {
        return Vec::new();
    }
    let num_seeds = rng.random_range(CLUSTER_SEEDS);
    let seeds = uniform_points(rng, num_seeds);
    let noise = Normal::new(0.0, CLUSTER_SIGMA).expect("valid sigma");
    (0..n)
        .map(|_| {
            let s = seeds[rng.random_range(0..num_seeds)];
            [
                (s[0] + noise.sample(rng)).clamp(0.0, 1.0),
                (s[1] + noise.sample(rng)).clamp(0.0, 1.0),
            ]
        })
        .collect()
}

/// Parsed keyword header plus sections of a TSPLIB-family file.
#[derive(Default)]
struct LibFile {
    header: HashMap<String, (usize, String)>,
    coords: Vec<(usize, usize, [f64; 2])>,
    demands: Option<Vec<(usize, usize, u32)>>,
    depots: Option<Vec<usize>>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Header,
    Coords,
    Demands,
    Depots,
    /// Sections we do not read (display data, explicit weights, ...).
    Skipped,
}

fn parse_err(line: usize, message: impl Into<String>) -> InstanceError {
    InstanceError::Parse { line, message: message.into() }
}

fn is_section_line(line: &str) -> bool {
    line.split_whitespace()
        .next()
        .is_some_and(|t| t.ends_with("_SECTION") || t == "EOF")
}

fn read_lib(text: &[u8]) -> Result<LibFile, InstanceError> {
    let text = std::str::from_utf8(text).map_err(|e| parse_err(0, format!("not utf-8: {e}")))?;
    let mut file = LibFile::default();
    let mut section = Section::Header;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if is_section_line(line) {
            let keyword = line.split_whitespace().next().unwrap_or_default();
            section = match keyword {
                "EOF" => break,
                "NODE_COORD_SECTION" => Section::Coords,
                "DEMAND_SECTION" => {
                    file.demands = Some(Vec::new());
                    Section::Demands
                }
                "DEPOT_SECTION" => {
                    file.depots = Some(Vec::new());
                    Section::Depots
                }
                _ => Section::Skipped,
            };
            continue;
        }
        match section {
            Section::Header => {
                let (key, value) = match line.split_once(':') {
                    Some((k, v)) => (k.trim(), v.trim()),
                    None => line.split_once(char::is_whitespace).map_or((line, ""), |(k, v)| (k, v.trim())),
                };
                file.header.insert(key.to_ascii_uppercase(), (lineno, value.to_string()));
            }
            Section::Coords => {
                let mut tok = line.split_whitespace();
                let (Some(id), Some(x), Some(y)) = (tok.next(), tok.next(), tok.next()) else {
                    return Err(parse_err(lineno, format!("malformed coordinate line {line:?}")));
                };
                let id = id.parse::<usize>().map_err(|_| parse_err(lineno, format!("bad node id {id:?}")))?;
                let x = x.parse::<f64>().map_err(|_| parse_err(lineno, format!("bad x coordinate {x:?}")))?;
                let y = y.parse::<f64>().map_err(|_| parse_err(lineno, format!("bad y coordinate {y:?}")))?;
                file.coords.push((lineno, id, [x, y]));
            }
            Section::Demands => {
                let mut tok = line.split_whitespace();
                let (Some(id), Some(g)) = (tok.next(), tok.next()) else {
                    return Err(parse_err(lineno, format!("malformed demand line {line:?}")));
                };
                let id = id.parse::<usize>().map_err(|_| parse_err(lineno, format!("bad node id {id:?}")))?;
                let g = g.parse::<u32>().map_err(|_| parse_err(lineno, format!("bad demand {g:?}")))?;
                file.demands.get_or_insert_with(Vec::new).push((lineno, id, g));
            }
            Section::Skipped => {}
            Section::Depots => {
                for tok in line.split_whitespace() {
                    let v = tok.parse::<i64>().map_err(|_| parse_err(lineno, format!("bad depot id {tok:?}")))?;
                    if v == -1 {
                        section = Section::Header;
                        break;
                    }
                    let v = usize::try_from(v).map_err(|_| parse_err(lineno, format!("bad depot id {v}")))?;
                    file.depots.get_or_insert_with(Vec::new).push(v);
                }
            }
        }
    }
    Ok(file)
}

impl LibFile {
    fn value(&self, key: &str) -> Option<&str> {
        self.header.get(key).map(|(_, v)| v.as_str())
    }

    fn check_edge_weight_type(&self) -> Result<(), InstanceError> {
        match self.value("EDGE_WEIGHT_TYPE") {
            Some("EUC_2D") => Ok(()),
            Some(other) => Err(InstanceError::UnsupportedFormat {
                keyword: "EDGE_WEIGHT_TYPE".into(),
                value: other.into(),
            }),
            None => Err(InstanceError::MissingSection("EDGE_WEIGHT_TYPE".into())),
        }
    }

    fn dimension(&self) -> Result<usize, InstanceError> {
        let (line, v) = self
            .header
            .get("DIMENSION")
            .ok_or_else(|| InstanceError::MissingSection("DIMENSION".into()))?;
        v.parse::<usize>().map_err(|_| parse_err(*line, format!("bad DIMENSION {v:?}")))
    }

    /// Coordinates ordered by node id `1..=dimension`.
    fn ordered_coords(&self, n: usize) -> Result<Vec<[f64; 2]>, InstanceError> {
        if self.coords.is_empty() {
            return Err(InstanceError::MissingSection("NODE_COORD_SECTION".into()));
        }
        let mut out: Vec<Option<[f64; 2]>> = vec![None; n];
        for &(line, id, c) in &self.coords {
            if id == 0 || id > n {
                return Err(parse_err(line, format!("node id {id} outside 1..={n}")));
            }
            if out[id - 1].replace(c).is_some() {
                return Err(parse_err(line, format!("duplicate node id {id}")));
            }
        }
        out.into_iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| {
                    InstanceError::Validation(format!("NODE_COORD_SECTION is missing node {}", i + 1))
                })
            })
            .collect()
    }

    fn name(&self) -> String {
        self.value("NAME").unwrap_or("unnamed").to_string()
    }
}

/// Parses a TSPLIB `TYPE: TSP` file with `EDGE_WEIGHT_TYPE: EUC_2D`.
pub fn parse_tsplib(text: &[u8]) -> Result<RoutingInstance, InstanceError> {
    let file = read_lib(text)?;
    if let Some(t) = file.value("TYPE") {
        if t != "TSP" {
            return Err(InstanceError::UnsupportedFormat { keyword: "TYPE".into(), value: t.into() });
        }
    }
    file.check_edge_weight_type()?;
    let n = file.dimension()?;
    let coords = file.ordered_coords(n)?;
    RoutingInstance::tsp(file.name(), coords, DistanceMode::EuclidRounded)
}

/// Parses a CVRPLIB file. The declared depot becomes node 0; the remaining
/// nodes keep their file order.
pub fn parse_cvrplib(text: &[u8]) -> Result<RoutingInstance, InstanceError> {
    let file = read_lib(text)?;
    file.check_edge_weight_type()?;
    let n = file.dimension()?;
    let (cap_line, cap) = file
        .header
        .get("CAPACITY")
        .ok_or_else(|| InstanceError::MissingSection("CAPACITY".into()))?;
    let capacity = cap
        .parse::<u32>()
        .map_err(|_| parse_err(*cap_line, format!("bad CAPACITY {cap:?}")))?;
    let coords = file.ordered_coords(n)?;
    let demand_rows = file
        .demands
        .as_ref()
        .ok_or_else(|| InstanceError::MissingSection("DEMAND_SECTION".into()))?;
    let mut demands: Vec<Option<u32>> = vec![None; n];
    for &(line, id, g) in demand_rows {
        if id == 0 || id > n {
            return Err(parse_err(line, format!("node id {id} outside 1..={n}")));
        }
        demands[id - 1] = Some(g);
    }
    let demands: Vec<u32> = demands
        .into_iter()
        .enumerate()
        .map(|(i, g)| {
            g.ok_or_else(|| parse_err(0, format!("DEMAND_SECTION is missing node {}", i + 1)))
        })
        .collect::<Result<_, _>>()?;
    let depots = file
        .depots
        .as_ref()
        .filter(|d| !d.is_empty())
        .ok_or_else(|| InstanceError::MissingSection("DEPOT_SECTION".into()))?;
    if depots.len() > 1 {
        return Err(InstanceError::UnsupportedFormat {
            keyword: "DEPOT_SECTION".into(),
            value: format!("{} depots", depots.len()),
        });
    }
    let depot = depots[0];
    if depot == 0 || depot > n {
        return Err(InstanceError::Validation(format!("depot id {depot} outside 1..={n}")));
    }
    let order: Vec<usize> = std::iter::once(depot - 1)
        .chain((0..n).filter(|&i| i != depot - 1))
        .collect();
    RoutingInstance::cvrp(
        file.name(),
        order.iter().map(|&i| coords[i]).collect(),
        order.iter().map(|&i| demands[i]).collect(),
        capacity,
        DistanceMode::EuclidRounded,
    )
}

/// Dispatches on the `TYPE` keyword (TSP when absent), or parses JSON when
/// the text starts with `{`.
pub fn parse_any(text: &[u8]) -> Result<RoutingInstance, crate::Error> {
    let trimmed = text.iter().position(|b| !b.is_ascii_whitespace()).map_or(&text[..0], |p| &text[p..]);
    if trimmed.first() == Some(&b'{') {
        let file: InstanceFile = serde_json::from_slice(text)?;
        return Ok(RoutingInstance::from_file(file)?);
    }
    let is_cvrp = std::str::from_utf8(text)
        .map(|s| {
            s.lines().any(|l| {
                l.split_once(':')
                    .is_some_and(|(k, v)| k.trim() == "TYPE" && v.trim() == "CVRP")
            })
        })
        .unwrap_or(false);
    if is_cvrp {
        Ok(parse_cvrplib(text)?)
    } else {
        Ok(parse_tsplib(text)?)
    }
}
