//! Operator-selection policy.
//!
//! State: one feature row per node plus a short history of recent actions
//! and their effects. Network: per-node linear embedding, one multi-head
//! self-attention block with a residual connection, mean pooling, the
//! flattened history appended, then two fully connected layers (ReLU in
//! between) and a softmax over the action catalog.
//!
//! Parameters live in one flat vector in the order
//! `embed_w, embed_b, w_q, w_k, w_v, w_o, fc1_w, fc1_b, fc2_w, fc2_b`
//! (row-major, weights stored input-major: `x · W`). Gradients are computed
//! by hand and training uses REINFORCE with a baseline and Adam.

use std::collections::VecDeque;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, ArrayViewMut1, ArrayViewMut2, Axis};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{ProblemKind, RoutingInstance};
use crate::rng::rng_from_seed;
use crate::solution::Solution;

pub const TSP_FEATURES: usize = 9;
pub const CVRP_FEATURES: usize = 11;

const MAGIC: &[u8; 8] = b"GRPOLICY";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid policy config: {0}")]
    InvalidConfig(String),
    #[error("training diverged: non-finite gradient")]
    TrainingDiverged,
    #[error("empty trajectory")]
    EmptyTrajectory,
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    /// Features per node row.
    pub input_dim: usize,
    pub num_actions: usize,
    pub embed_dim: usize,
    pub heads: usize,
    pub hidden: usize,
    pub history: usize,
    pub learning_rate: f64,
}

impl PolicyConfig {
    /// D = 64, 4 heads, F1 = 128, H = 8, learning rate 0.001.
    pub fn new(kind: ProblemKind, num_actions: usize) -> Self {
        PolicyConfig {
            input_dim: match kind {
                ProblemKind::Tsp => TSP_FEATURES,
                ProblemKind::Cvrp => CVRP_FEATURES,
            },
            num_actions,
            embed_dim: 64,
            heads: 4,
            hidden: 128,
            history: 8,
            learning_rate: 1e-3,
        }
    }

    pub fn history_dim(&self) -> usize {
        self.history * (self.num_actions + 1)
    }

    fn concat_dim(&self) -> usize {
        self.embed_dim + self.history_dim()
    }

    fn validate(&self) -> Result<(), PolicyError> {
        let c = self;
        if c.input_dim == 0 || c.num_actions == 0 || c.embed_dim == 0 || c.heads == 0 || c.hidden == 0 {
            return Err(PolicyError::InvalidConfig("all dimensions must be positive".into()));
        }
        if c.embed_dim % c.heads != 0 {
            return Err(PolicyError::InvalidConfig(format!(
                "embed_dim {} not divisible by {} heads",
                c.embed_dim, c.heads
            )));
        }
        if !(c.learning_rate.is_finite() && c.learning_rate > 0.0) {
            return Err(PolicyError::InvalidConfig("learning rate must be positive".into()));
        }
        Ok(())
    }
}

/// Recent `(action, effect)` pairs, newest first.
#[derive(Debug, Clone, PartialEq)]
pub struct History {
    len: usize,
    num_actions: usize,
    entries: VecDeque<(usize, f64)>,
}

impl History {
    pub fn new(len: usize, num_actions: usize) -> Self {
        History { len, num_actions, entries: VecDeque::with_capacity(len + 1) }
    }

    /// Records an action; `improved` gives effect +1, otherwise -1.
    pub fn push(&mut self, action: usize, improved: bool) {
        self.entries.push_front((action, if improved { 1.0 } else { -1.0 }));
        self.entries.truncate(self.len);
    }

    /// `len` blocks of one-hot action followed by the effect; missing
    /// entries are zero.
    pub fn encode(&self) -> Vec<f64> {
        let block = self.num_actions + 1;
        let mut out = vec![0.0; self.len * block];
        for (h, &(a, e)) in self.entries.iter().enumerate() {
            out[h * block + a] = 1.0;
            out[h * block + self.num_actions] = e;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateFeatures {
    /// One row per node.
    pub nodes: Array2<f64>,
    pub history: Vec<f64>,
}

/// Builds the per-node rows
/// `(m, n, m-, n-, m+, n+, d(-,i), d(i,+), d(-,+))` and, for CVRP, the
/// demand and the free capacity of the node's route, both over capacity.
pub fn extract_features(inst: &RoutingInstance, sol: &Solution, history: &History) -> StateFeatures {
    let n = inst.len();
    let cvrp = inst.is_cvrp();
    let width = if cvrp { CVRP_FEATURES } else { TSP_FEATURES };
    let coords = inst.coords();
    let mut nodes = Array2::zeros((n, width));
    let cap = f64::from(inst.capacity().max(1));
    for i in 0..n {
        let mut row = nodes.row_mut(i);
        let c = coords[i];
        row[0] = c[0];
        row[1] = c[1];
        if cvrp && i == 0 {
            row[2] = c[0];
            row[3] = c[1];
            row[4] = c[0];
            row[5] = c[1];
            row[10] = 1.0;
            continue;
        }
        let (p, s) = sol.neighbours(i);
        row[2] = coords[p][0];
        row[3] = coords[p][1];
        row[4] = coords[s][0];
        row[5] = coords[s][1];
        row[6] = inst.dist(p, i);
        row[7] = inst.dist(i, s);
        row[8] = inst.dist(p, s);
        if let Solution::Routes(rs) = sol {
            let (r, _) = rs.locate(i).expect("customer in a route");
            row[9] = f64::from(inst.demand(i)) / cap;
            row[10] = (cap - rs.loads()[r] as f64) / cap;
        }
    }
    StateFeatures { nodes, history: history.encode() }
}

/// With probability `epsilon` a uniform action, otherwise a draw from
/// `probs`.
pub fn sample_action<R: Rng + ?Sized>(probs: &[f64], epsilon: f64, rng: &mut R) -> usize {
    sample_action_masked(probs, None, epsilon, rng)
}

/// [`sample_action`] restricted to actions whose `mask` entry is true.
pub fn sample_action_masked<R: Rng + ?Sized>(
    probs: &[f64],
    mask: Option<&[bool]>,
    epsilon: f64,
    rng: &mut R,
) -> usize {
    let allowed = |a: usize| mask.is_none_or(|m| m[a]);
    let explore = epsilon > 0.0 && rng.random::<f64>() < epsilon;
    let weights: Vec<f64> = probs
        .iter()
        .enumerate()
        .map(|(a, &p)| if !allowed(a) { 0.0 } else if explore { 1.0 } else { p })
        .collect();
    match WeightedIndex::new(&weights) {
        Ok(dist) => dist.sample(rng),
        // all remaining mass underflowed: fall back to uniform
        Err(_) => {
            let choices: Vec<usize> = (0..probs.len()).filter(|&a| allowed(a)).collect();
            choices[rng.random_range(0..choices.len())]
        }
    }
}

/// +1 when the cost went down, -1 otherwise.
pub fn reward_binary(prev_cost: f64, new_cost: f64) -> f64 {
    if new_cost < prev_cost - 1e-12 {
        1.0
    } else {
        -1.0
    }
}

/// Cost reduction over a whole improvement phase, shared by all its actions.
pub fn reward_advantage(phase_first_cost: f64, phase_final_cost: f64) -> f64 {
    phase_first_cost - phase_final_cost
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: StateFeatures,
    pub action: usize,
    pub reward: f64,
    pub log_prob: f64,
}

pub type Trajectory = Vec<Sample>;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Layout {
    embed_w: usize,
    embed_b: usize,
    w_q: usize,
    w_k: usize,
    w_v: usize,
    w_o: usize,
    fc1_w: usize,
    fc1_b: usize,
    fc2_w: usize,
    fc2_b: usize,
    total: usize,
}

impl Layout {
    fn new(c: &PolicyConfig) -> Self {
        let (f, d, h1, a, cd) = (c.input_dim, c.embed_dim, c.hidden, c.num_actions, c.concat_dim());
        let mut at = 0;
        let mut take = |n: usize| {
            let start = at;
            at += n;
            start
        };
        let embed_w = take(f * d);
        let embed_b = take(d);
        let w_q = take(d * d);
        let w_k = take(d * d);
        let w_v = take(d * d);
        let w_o = take(d * d);
        let fc1_w = take(cd * h1);
        let fc1_b = take(h1);
        let fc2_w = take(h1 * a);
        let fc2_b = take(a);
        Layout { embed_w, embed_b, w_q, w_k, w_v, w_o, fc1_w, fc1_b, fc2_w, fc2_b, total: at }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

/// Activations kept from a forward pass for backpropagation.
struct Cache {
    x: Array2<f64>,
    e: Array2<f64>,
    q: Array2<f64>,
    k: Array2<f64>,
    v: Array2<f64>,
    attn: Vec<Array2<f64>>,
    o: Array2<f64>,
    c: Array1<f64>,
    pre1: Array1<f64>,
    h1: Array1<f64>,
    probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    config: PolicyConfig,
    layout: Layout,
    params: Vec<f64>,
    adam: Adam,
}

impl Policy {
    /// Uniform(±1/sqrt(fan_in)) weights, zero biases, zero output layer.
    pub fn new(config: PolicyConfig, seed: u64) -> Result<Self, PolicyError> {
        config.validate()?;
        let layout = Layout::new(&config);
        let mut params = vec![0.0; layout.total];
        let mut rng = rng_from_seed(seed);
        let d = config.embed_dim;
        let mut fill = |start: usize, len: usize, fan_in: usize| {
            let bound = 1.0 / (fan_in as f64).sqrt();
            for p in &mut params[start..start + len] {
                *p = rng.random_range(-bound..bound);
            }
        };
        fill(layout.embed_w, config.input_dim * d, config.input_dim);
        for start in [layout.w_q, layout.w_k, layout.w_v, layout.w_o] {
            fill(start, d * d, d);
        }
        fill(layout.fc1_w, config.concat_dim() * config.hidden, config.concat_dim());
        Ok(Self::from_parts(config, layout, params))
    }

    fn from_parts(config: PolicyConfig, layout: Layout, params: Vec<f64>) -> Self {
        let n = params.len();
        Policy { config, layout, params, adam: Adam { m: vec![0.0; n], v: vec![0.0; n], t: 0 } }
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.config
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Number of optimizer steps taken.
    pub fn steps(&self) -> u64 {
        self.adam.t
    }

    fn mat(&self, start: usize, rows: usize, cols: usize) -> ArrayView2<'_, f64> {
        ArrayView2::from_shape((rows, cols), &self.params[start..start + rows * cols]).expect("layout")
    }

    fn vec(&self, start: usize, len: usize) -> ArrayView1<'_, f64> {
        ArrayView1::from(&self.params[start..start + len])
    }

    fn check(&self, s: &StateFeatures) -> Result<(), PolicyError> {
        let c = &self.config;
        if s.nodes.ncols() != c.input_dim || s.nodes.nrows() == 0 {
            return Err(PolicyError::Shape(format!(
                "node rows are {}x{}, policy expects width {}",
                s.nodes.nrows(),
                s.nodes.ncols(),
                c.input_dim
            )));
        }
        if s.history.len() != c.history_dim() {
            return Err(PolicyError::Shape(format!(
                "history has {} values, policy expects {}",
                s.history.len(),
                c.history_dim()
            )));
        }
        Ok(())
    }

    /// Action probabilities for a state.
    pub fn forward(&self, s: &StateFeatures) -> Result<Vec<f64>, PolicyError> {
        self.check(s)?;
        Ok(self.run(s).probs)
    }

    /// Mean-pooled node encoding, exposed for invariance checks.
    pub fn pooled(&self, s: &StateFeatures) -> Result<Vec<f64>, PolicyError> {
        self.check(s)?;
        let cache = self.run(s);
        Ok(cache.c.slice(s![..self.config.embed_dim]).to_vec())
    }

    fn run(&self, s: &StateFeatures) -> Cache {
        let c = &self.config;
        let l = &self.layout;
        let (d, heads) = (c.embed_dim, c.heads);
        let dh = d / heads;
        let scale = 1.0 / (dh as f64).sqrt();
        let x = s.nodes.clone();
        let e = x.dot(&self.mat(l.embed_w, c.input_dim, d)) + &self.vec(l.embed_b, d);
        let q = e.dot(&self.mat(l.w_q, d, d));
        let k = e.dot(&self.mat(l.w_k, d, d));
        let v = e.dot(&self.mat(l.w_v, d, d));
        let mut o = Array2::zeros(e.raw_dim());
        let mut attn = Vec::with_capacity(heads);
        for h in 0..heads {
            let cols = s![.., h * dh..(h + 1) * dh];
            let mut a = q.slice(cols).dot(&k.slice(cols).t()) * scale;
            for mut row in a.rows_mut() {
                softmax_in_place(row.as_slice_mut().expect("contiguous"));
            }
            o.slice_mut(cols).assign(&a.dot(&v.slice(cols)));
            attn.push(a);
        }
        let z = &e + &o.dot(&self.mat(l.w_o, d, d));
        let g = z.mean_axis(Axis(0)).expect("non-empty");
        let mut cvec = Array1::zeros(c.concat_dim());
        cvec.slice_mut(s![..d]).assign(&g);
        cvec.slice_mut(s![d..]).assign(&ArrayView1::from(&s.history[..]));
        let pre1 = cvec.dot(&self.mat(l.fc1_w, c.concat_dim(), c.hidden)) + &self.vec(l.fc1_b, c.hidden);
        let h1 = pre1.mapv(|v| v.max(0.0));
        let logits = h1.dot(&self.mat(l.fc2_w, c.hidden, c.num_actions)) + &self.vec(l.fc2_b, c.num_actions);
        let mut probs = logits.to_vec();
        softmax_in_place(&mut probs);
        Cache { x, e, q, k, v, attn, o, c: cvec, pre1, h1, probs }
    }

    /// Adds `scale * d(dlogits · logits)/dθ` into `grad`.
    fn backward(&self, cache: &Cache, dlogits: &[f64], scale: f64, grad: &mut [f64]) {
        let c = &self.config;
        let l = &self.layout;
        let (d, heads, f1, a_n, cd) = (c.embed_dim, c.heads, c.hidden, c.num_actions, c.concat_dim());
        let dh = d / heads;
        let att_scale = 1.0 / (dh as f64).sqrt();
        let n = cache.x.nrows();
        let dlog = Array1::from(dlogits.to_vec()) * scale;

        let gm = |start: usize, rows: usize, cols: usize, delta: &Array2<f64>, grad: &mut [f64]| {
            let mut view = ArrayViewMut2::from_shape((rows, cols), &mut grad[start..start + rows * cols]).expect("layout");
            view += delta;
        };
        let gv = |start: usize, delta: &Array1<f64>, grad: &mut [f64]| {
            let mut view = ArrayViewMut1::from(&mut grad[start..start + delta.len()]);
            view += delta;
        };

        // output layer
        let outer = |u: &Array1<f64>, w: &Array1<f64>| {
            let col = u.view().insert_axis(Axis(1));
            let row = w.view().insert_axis(Axis(0));
            col.dot(&row)
        };
        gm(l.fc2_w, f1, a_n, &outer(&cache.h1, &dlog), grad);
        gv(l.fc2_b, &dlog, grad);
        let dh1 = self.mat(l.fc2_w, f1, a_n).dot(&dlog);
        let dpre1 = Array1::from_shape_fn(f1, |i| if cache.pre1[i] > 0.0 { dh1[i] } else { 0.0 });
        gm(l.fc1_w, cd, f1, &outer(&cache.c, &dpre1), grad);
        gv(l.fc1_b, &dpre1, grad);
        let dc = self.mat(l.fc1_w, cd, f1).dot(&dpre1);
        let dg = dc.slice(s![..d]).to_owned() / n as f64;

        // pooling and residual
        let dz = Array2::from_shape_fn((n, d), |(_, j)| dg[j]);
        let w_o = self.mat(l.w_o, d, d);
        gm(l.w_o, d, d, &cache.o.t().dot(&dz), grad);
        let d_o = dz.dot(&w_o.t());
        let mut de = dz;

        // attention heads
        let mut dq = Array2::zeros((n, d));
        let mut dk = Array2::zeros((n, d));
        let mut dv = Array2::zeros((n, d));
        for h in 0..heads {
            let cols = s![.., h * dh..(h + 1) * dh];
            let a = &cache.attn[h];
            let doh = d_o.slice(cols);
            let da = doh.dot(&cache.v.slice(cols).t());
            dv.slice_mut(cols).assign(&a.t().dot(&doh));
            let mut ds = Array2::zeros((n, n));
            for i in 0..n {
                let dot: f64 = (0..n).map(|j| da[[i, j]] * a[[i, j]]).sum();
                for j in 0..n {
                    ds[[i, j]] = a[[i, j]] * (da[[i, j]] - dot) * att_scale;
                }
            }
            dq.slice_mut(cols).assign(&ds.dot(&cache.k.slice(cols)));
            dk.slice_mut(cols).assign(&ds.t().dot(&cache.q.slice(cols)));
        }
        let et = cache.e.t();
        gm(l.w_q, d, d, &et.dot(&dq), grad);
        gm(l.w_k, d, d, &et.dot(&dk), grad);
        gm(l.w_v, d, d, &et.dot(&dv), grad);
        de = de + dq.dot(&self.mat(l.w_q, d, d).t()) + dk.dot(&self.mat(l.w_k, d, d).t()) + dv.dot(&self.mat(l.w_v, d, d).t());

        // embedding
        gm(l.embed_w, c.input_dim, d, &cache.x.t().dot(&de), grad);
        gv(l.embed_b, &de.sum_axis(Axis(0)), grad);
    }

    /// `log P(action | s)` and its gradient with respect to every parameter.
    pub fn log_prob_grad(&self, s: &StateFeatures, action: usize) -> Result<(f64, Vec<f64>), PolicyError> {
        self.check(s)?;
        if action >= self.config.num_actions {
            return Err(PolicyError::Shape(format!("action {action} out of range")));
        }
        let cache = self.run(s);
        let mut grad = vec![0.0; self.params.len()];
        let dlogits = one_hot_minus(&cache.probs, action);
        self.backward(&cache, &dlogits, 1.0, &mut grad);
        Ok((cache.probs[action].ln(), grad))
    }

    /// One ascent step on `mean((r - b) * log P(a|s))` with Adam. When every
    /// `r - b` is zero the parameters and optimizer state are left untouched.
    pub fn reinforce_update(&mut self, traj: &[Sample], baseline: f64) -> Result<(), PolicyError> {
        if traj.is_empty() {
            return Err(PolicyError::EmptyTrajectory);
        }
        if traj.iter().all(|s| s.reward - baseline == 0.0) {
            return Ok(());
        }
        let mut grad = vec![0.0; self.params.len()];
        let inv = 1.0 / traj.len() as f64;
        for sample in traj {
            let coeff = (sample.reward - baseline) * inv;
            if coeff == 0.0 {
                continue;
            }
            self.check(&sample.features)?;
            let cache = self.run(&sample.features);
            self.backward(&cache, &one_hot_minus(&cache.probs, sample.action), coeff, &mut grad);
        }
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(PolicyError::TrainingDiverged);
        }
        self.adam_ascent(&grad);
        if self.params.iter().any(|p| !p.is_finite()) {
            return Err(PolicyError::TrainingDiverged);
        }
        Ok(())
    }

    fn adam_ascent(&mut self, grad: &[f64]) {
        const BETA1: f64 = 0.9;
        const BETA2: f64 = 0.999;
        const EPS: f64 = 1e-8;
        let st = &mut self.adam;
        st.t += 1;
        let t = st.t as i32;
        let c1 = 1.0 - BETA1.powi(t);
        let c2 = 1.0 - BETA2.powi(t);
        let lr = self.config.learning_rate;
        for i in 0..grad.len() {
            st.m[i] = BETA1 * st.m[i] + (1.0 - BETA1) * grad[i];
            st.v[i] = BETA2 * st.v[i] + (1.0 - BETA2) * grad[i] * grad[i];
            self.params[i] += lr * (st.m[i] / c1) / ((st.v[i] / c2).sqrt() + EPS);
        }
    }

    /// Checkpoint bytes: magic, version, header `(D, heads, F1, H, |A|,
    /// input_dim)` as u32, parameter count as u64, then the parameters as
    /// little-endian f64 in layout order. Optimizer state is not saved.
    pub fn to_bytes(&self) -> Vec<u8> {
        let c = &self.config;
        let mut out = Vec::with_capacity(48 + 8 * self.params.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        for v in [c.embed_dim, c.heads, c.hidden, c.history, c.num_actions, c.input_dim] {
            out.extend_from_slice(&(v as u32).to_le_bytes());
        }
        out.extend_from_slice(&(self.params.len() as u64).to_le_bytes());
        for p in &self.params {
            out.extend_from_slice(&p.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, PolicyError> {
        let bad = |m: &str| PolicyError::Checkpoint(m.to_string());
        let mut r = bytes;
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(|_| bad("truncated header"))?;
        if &magic != MAGIC {
            return Err(bad("bad magic"));
        }
        let mut u32s = [0u32; 7];
        for v in &mut u32s {
            let mut b = [0u8; 4];
            r.read_exact(&mut b).map_err(|_| bad("truncated header"))?;
            *v = u32::from_le_bytes(b);
        }
        if u32s[0] != FORMAT_VERSION {
            return Err(PolicyError::Checkpoint(format!("unsupported version {}", u32s[0])));
        }
        let [_, embed_dim, heads, hidden, history, num_actions, input_dim] = u32s.map(|v| v as usize);
        let config = PolicyConfig { input_dim, num_actions, embed_dim, heads, hidden, history, learning_rate: 1e-3 };
        config.validate()?;
        let layout = Layout::new(&config);
        let mut b = [0u8; 8];
        r.read_exact(&mut b).map_err(|_| bad("truncated header"))?;
        let count = u64::from_le_bytes(b) as usize;
        if count != layout.total || r.len() != 8 * count {
            return Err(PolicyError::Checkpoint(format!(
                "expected {} parameters, header says {count} with {} bytes left",
                layout.total,
                r.len()
            )));
        }
        let params: Vec<f64> = r.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        if params.iter().any(|p| !p.is_finite()) {
            return Err(bad("non-finite parameter"));
        }
        Ok(Self::from_parts(config, layout, params))
    }

    pub fn save(&self, path: &Path) -> Result<(), crate::Error> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, crate::Error> {
        Ok(Self::from_bytes(&std::fs::read(path)?)?)
    }
}

fn softmax_in_place(v: &mut [f64]) {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for x in v.iter_mut() {
        *x = (*x - max).exp();
        sum += *x;
    }
    for x in v.iter_mut() {
        *x /= sum;
    }
}

fn one_hot_minus(probs: &[f64], action: usize) -> Vec<f64> {
    probs.iter().enumerate().map(|(i, &p)| f64::from(u8::from(i == action)) - p).collect()
}
