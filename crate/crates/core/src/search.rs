//! The search loop: policy-selected operators, stall detection, penalty
//! events, and policy training.
//!
//! Each step picks an action from the catalog (epsilon-greedy over the
//! policy, or uniform when no policy is given), runs that operator's best
//! move against the augmented objective and applies it if one exists. A
//! step that does not lower the true cost `L` increments a stall counter;
//! once it reaches the threshold the current solution is a local minimum,
//! its maximal-utility edges are penalized and a new improvement phase
//! starts. The run stops after `max_steps` actions, at the time limit, or
//! after `max_idle_phases` consecutive phases without a new best.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gls::{penalize, PenaltyState, DEFAULT_LAMBDA};
use crate::instance::{generate_cvrp, generate_uniform_tsp, GenSpec, InstanceError, ProblemKind, RoutingInstance};
use crate::operators::{apply_move, best_move, CandidateLists, EvalContext, OperatorError, OperatorKind};
use crate::policy::{
    extract_features, reward_advantage, reward_binary, sample_action_masked, History, Policy, PolicyConfig,
    PolicyError, Sample,
};
use crate::rng::{rng_from_seed, split_seed};
use crate::solution::{initial_solution, validate, Solution, Violation};

/// Candidate-list prefix used by the narrow action presets.
pub const NARROW_WIDTH: usize = 5;
/// History length used when no policy supplies one.
const DEFAULT_HISTORY: usize = 8;
/// Strict-decrease tolerance on the true cost.
const COST_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("invalid search config: {0}")]
    InvalidConfig(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("policy does not fit this search: {0}")]
    PolicyMismatch(String),
    #[error("best solution failed validation: {0:?}")]
    Infeasible(Vec<Violation>),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

/// Ablation variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// 2-opt, relocate, swap and three-permutation with penalties.
    #[serde(rename = "L2GLS")]
    L2gls,
    /// Without three-permutation.
    #[serde(rename = "L2GLS2")]
    L2gls2,
    /// Without relocate.
    #[serde(rename = "L2GLS3")]
    L2gls3,
    /// All operators, penalties switched off.
    #[serde(rename = "NO_PENALTY")]
    NoPenalty,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::L2gls, Variant::L2gls2, Variant::L2gls3, Variant::NoPenalty];

    pub fn name(self) -> &'static str {
        match self {
            Variant::L2gls => "L2GLS",
            Variant::L2gls2 => "L2GLS2",
            Variant::L2gls3 => "L2GLS3",
            Variant::NoPenalty => "NO_PENALTY",
        }
    }

    pub fn allows(self, op: OperatorKind) -> bool {
        !matches!(
            (self, op),
            (Variant::L2gls2, OperatorKind::ThreePerm) | (Variant::L2gls3, OperatorKind::Relocate)
        )
    }

    pub fn penalizes(self) -> bool {
        self != Variant::NoPenalty
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variant {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "l2gls" | "full" => Ok(Variant::L2gls),
            "l2gls2" | "no_three_perm" => Ok(Variant::L2gls2),
            "l2gls3" | "no_relocate" => Ok(Variant::L2gls3),
            "no_penalty" | "nopenalty" => Ok(Variant::NoPenalty),
            other => Err(SearchError::InvalidArgument(format!("unknown variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardVariant {
    /// +1/-1 per action.
    Binary,
    /// Phase cost reduction shared by every action of the phase.
    Advantage,
}

impl std::str::FromStr for RewardVariant {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "binary" => Ok(RewardVariant::Binary),
            "advantage" => Ok(RewardVariant::Advantage),
            other => Err(SearchError::InvalidArgument(format!("unknown reward {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Width {
    /// The first [`NARROW_WIDTH`] candidates.
    Narrow,
    /// The whole candidate list.
    Wide,
}

/// One catalog entry: an operator and its candidate-width preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub op: OperatorKind,
    pub width: Width,
}

impl Action {
    pub fn label(&self) -> String {
        match (self.op, self.width) {
            (OperatorKind::ThreePerm, _) => self.op.name().to_string(),
            (op, Width::Narrow) => format!("{}/narrow", op.name()),
            (op, Width::Wide) => format!("{}/wide", op.name()),
        }
    }
}

/// The ordered action list the policy chooses from. Variants mask entries
/// rather than shrink the list, so one policy serves every variant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionCatalog {
    actions: Vec<Action>,
}

impl ActionCatalog {
    pub fn full() -> Self {
        use OperatorKind::*;
        let mut actions = Vec::new();
        for op in [TwoOpt, Relocate, Swap] {
            actions.push(Action { op, width: Width::Narrow });
            actions.push(Action { op, width: Width::Wide });
        }
        actions.push(Action { op: ThreePerm, width: Width::Wide });
        ActionCatalog { actions }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn get(&self, i: usize) -> Action {
        self.actions[i]
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn mask(&self, variant: Variant) -> Vec<bool> {
        self.actions.iter().map(|a| variant.allows(a.op)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Total action steps `M`.
    pub max_steps: usize,
    /// Stall threshold `I`.
    pub stall_threshold: usize,
    pub epsilon: f64,
    pub lambda: f64,
    pub reward: RewardVariant,
    pub variant: Variant,
    /// Candidate-list length; `None` picks [`CandidateLists::default_k`].
    pub candidate_k: Option<usize>,
    pub seed: u64,
    /// Wall-clock limit in seconds.
    pub time_limit: Option<f64>,
    /// Stop after this many consecutive phases without a new best.
    pub max_idle_phases: Option<usize>,
    /// Trace sampling period in steps; new bests are always traced.
    pub trace_every: usize,
    /// Keep the per-step event log.
    pub record_events: bool,
    /// Policy update schedule in training runs.
    pub update_cadence: UpdateCadence,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_steps: 40_000,
            stall_threshold: 6,
            epsilon: 0.05,
            lambda: DEFAULT_LAMBDA,
            reward: RewardVariant::Advantage,
            variant: Variant::L2gls,
            candidate_k: None,
            seed: 0,
            time_limit: None,
            max_idle_phases: None,
            trace_every: 100,
            record_events: true,
            update_cadence: UpdateCadence::Episode,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let fail = |m: &str| Err(SearchError::InvalidConfig(m.to_string()));
        if self.max_steps == 0 {
            return fail("max_steps must be positive");
        }
        if self.stall_threshold == 0 {
            return fail("stall_threshold must be positive");
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return fail("epsilon must lie in [0, 1]");
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return fail("lambda must be a non-negative number");
        }
        if self.candidate_k == Some(0) {
            return fail("candidate_k must be positive");
        }
        if self.time_limit.is_some_and(|t| !(t > 0.0)) {
            return fail("time_limit must be positive");
        }
        if self.max_idle_phases == Some(0) {
            return fail("max_idle_phases must be positive");
        }
        Ok(())
    }
}

/// True once `stall_count` consecutive steps failed to lower `L`.
pub fn detect_local_min(stall_count: usize, threshold: usize) -> bool {
    stall_count >= threshold
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub step: usize,
    pub current: f64,
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    Action { action: usize, label: String, op: OperatorKind, applied: bool },
    /// Edges penalized at a local minimum with their new penalty values.
    Penalty { edges: Vec<(usize, usize, u32)> },
}

/// One log record. Costs are in working (normalized) units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub step: usize,
    #[serde(flatten)]
    pub kind: EventKind,
    pub delta_true: f64,
    pub current: f64,
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// Node ids are those of the input instance.
    pub best_solution: Solution,
    /// True cost of the best solution in raw instance units.
    pub best_cost: f64,
    /// Same cost in working units (unit square).
    pub best_cost_working: f64,
    pub initial_cost_working: f64,
    /// Working-unit trace of `(step, L, best L)`.
    pub trace: Vec<TracePoint>,
    pub events: Vec<Event>,
    pub wall_time: f64,
    pub steps_executed: usize,
    pub penalty_events: usize,
    pub phases: usize,
    /// Final penalty snapshot.
    pub penalties: Vec<(usize, usize, u32)>,
}

impl SearchResult {
    /// Event log as JSON lines.
    pub fn events_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("event serializes"));
            out.push('\n');
        }
        out
    }
}

/// When the policy is updated during training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateCadence {
    /// One update per improvement phase.
    Phase,
    /// Phases are pooled and the policy is updated once at the end of a run.
    Episode,
}

impl std::str::FromStr for UpdateCadence {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "phase" => Ok(UpdateCadence::Phase),
            "episode" => Ok(UpdateCadence::Episode),
            other => Err(SearchError::InvalidArgument(format!("unknown update cadence {other:?}"))),
        }
    }
}

enum Agent<'a> {
    Uniform,
    Frozen(&'a Policy),
    Train { policy: &'a mut Policy, batch: Vec<Sample>, updates: usize },
}

impl Agent<'_> {
    fn policy(&self) -> Option<&Policy> {
        match self {
            Agent::Uniform => None,
            Agent::Frozen(p) => Some(p),
            Agent::Train { policy, .. } => Some(policy),
        }
    }

    /// Closes a phase: assigns the phase's rewards and moves its samples
    /// into the update batch.
    fn end_phase(&mut self, traj: &mut Vec<Sample>, reward: RewardVariant, first_cost: f64, final_cost: f64) {
        let Agent::Train { batch, .. } = self else {
            traj.clear();
            return;
        };
        if reward == RewardVariant::Advantage {
            let r = reward_advantage(first_cost, final_cost);
            traj.iter_mut().for_each(|s| s.reward = r);
        }
        batch.append(traj);
    }

    /// REINFORCE step on the pooled batch with its mean reward as baseline.
    fn update(&mut self) -> Result<(), SearchError> {
        let Agent::Train { policy, batch, updates } = self else {
            return Ok(());
        };
        if batch.is_empty() {
            return Ok(());
        }
        // Adam would blow a rounding residue of the mean up to a full step,
        // so a constant batch gets its exact reward as baseline
        let first = batch[0].reward;
        let b = if batch.iter().all(|s| s.reward == first) {
            first
        } else {
            batch.iter().map(|s| s.reward).sum::<f64>() / batch.len() as f64
        };
        policy.reinforce_update(batch, b)?;
        *updates += 1;
        batch.clear();
        Ok(())
    }
}

fn check_policy(policy: &Policy, inst: &RoutingInstance, catalog: &ActionCatalog) -> Result<(), SearchError> {
    let expected = PolicyConfig::new(inst.kind(), catalog.len());
    let c = policy.config();
    if c.input_dim != expected.input_dim || c.num_actions != catalog.len() {
        return Err(SearchError::PolicyMismatch(format!(
            "policy has input {} and {} actions, search needs {} and {}",
            c.input_dim,
            c.num_actions,
            expected.input_dim,
            catalog.len()
        )));
    }
    Ok(())
}

/// Runs the search. Without a policy, actions are drawn uniformly.
pub fn solve(
    inst: &RoutingInstance,
    config: &SearchConfig,
    policy: Option<&Policy>,
) -> Result<SearchResult, SearchError> {
    let agent = policy.map_or(Agent::Uniform, Agent::Frozen);
    run(inst, config, agent)
}

/// [`solve`] with `variant` overriding the configured one.
pub fn run_variant(
    variant: Variant,
    inst: &RoutingInstance,
    config: &SearchConfig,
    policy: Option<&Policy>,
) -> Result<SearchResult, SearchError> {
    let config = SearchConfig { variant, ..config.clone() };
    solve(inst, &config, policy)
}

/// Runs one search in training mode, updating `policy` on the schedule set
/// by `config.update_cadence`. Returns the result and the number of updates.
pub fn solve_training(
    inst: &RoutingInstance,
    config: &SearchConfig,
    policy: &mut Policy,
) -> Result<(SearchResult, usize), SearchError> {
    let mut updates = 0;
    let result = {
        let agent = Agent::Train { policy, batch: Vec::new(), updates: 0 };
        run_counting(inst, config, agent, &mut updates)?
    };
    Ok((result, updates))
}

fn run(inst: &RoutingInstance, cfg: &SearchConfig, agent: Agent) -> Result<SearchResult, SearchError> {
    let mut updates = 0;
    run_counting(inst, cfg, agent, &mut updates)
}

fn run_counting(
    inst: &RoutingInstance,
    cfg: &SearchConfig,
    mut agent: Agent,
    updates_out: &mut usize,
) -> Result<SearchResult, SearchError> {
    cfg.validate()?;
    let started = Instant::now();
    let work = inst.normalize()?;
    let n = work.len();
    let k = cfg.candidate_k.unwrap_or_else(|| CandidateLists::default_k(n)).clamp(1, n - 1);
    let cands = CandidateLists::build(&work, k)?;
    let catalog = ActionCatalog::full();
    let mask = catalog.mask(cfg.variant);
    if let Some(p) = agent.policy() {
        check_policy(p, &work, &catalog)?;
    }
    let history_len = agent.policy().map_or(DEFAULT_HISTORY, |p| p.config().history);
    let uniform = vec![1.0 / catalog.len() as f64; catalog.len()];

    let mut sol = initial_solution(&work, split_seed(cfg.seed, 0));
    let mut rng = rng_from_seed(split_seed(cfg.seed, 1));
    let mut ps = PenaltyState::new(cfg.lambda);
    let mut history = History::new(history_len, catalog.len());
    let mut traj: Vec<Sample> = Vec::new();
    let training = matches!(agent, Agent::Train { .. });

    let initial_cost = sol.cost();
    let mut best = sol.clone();
    let mut best_cost = sol.cost();
    let mut trace = vec![TracePoint { step: 0, current: best_cost, best: best_cost }];
    let mut events = Vec::new();
    let mut stall = 0;
    let mut phase_first = sol.cost();
    let mut phase_new_best = false;
    let mut idle_phases = 0;
    let mut phases = 0;
    let mut penalty_events = 0;
    let mut steps = 0;

    while steps < cfg.max_steps {
        if cfg.time_limit.is_some_and(|t| started.elapsed().as_secs_f64() >= t) {
            break;
        }
        let (probs, features) = match agent.policy() {
            Some(p) => {
                let f = extract_features(&work, &sol, &history);
                (p.forward(&f)?, Some(f))
            }
            None => (uniform.clone(), None),
        };
        let a = sample_action_masked(&probs, Some(&mask), cfg.epsilon, &mut rng);
        let action = catalog.get(a);
        let width = match action.width {
            Width::Narrow => NARROW_WIDTH.min(k),
            Width::Wide => k,
        };
        let prev = sol.cost();
        let mv = {
            let ctx = EvalContext::new(&work, &ps, &cands).with_width(width);
            best_move(action.op, &sol, &ctx)
        };
        if let Some(m) = &mv {
            apply_move(&work, &mut sol, m)?;
        }
        steps += 1;
        let now = sol.cost();
        let improved = now < prev - COST_EPS;
        history.push(a, improved);
        if training {
            if let Some(f) = features {
                traj.push(Sample { features: f, action: a, reward: reward_binary(prev, now), log_prob: probs[a].ln() });
            }
        }
        if now < best_cost - COST_EPS {
            best_cost = now;
            best = sol.clone();
            phase_new_best = true;
            trace.push(TracePoint { step: steps, current: now, best: best_cost });
        } else if cfg.trace_every > 0 && steps % cfg.trace_every == 0 {
            trace.push(TracePoint { step: steps, current: now, best: best_cost });
        }
        if cfg.record_events {
            events.push(Event {
                step: steps,
                kind: EventKind::Action { action: a, label: action.label(), op: action.op, applied: mv.is_some() },
                delta_true: now - prev,
                current: now,
                best: best_cost,
            });
        }
        stall = if improved { 0 } else { stall + 1 };

        if detect_local_min(stall, cfg.stall_threshold) {
            phases += 1;
            agent.end_phase(&mut traj, cfg.reward, phase_first, now);
            if cfg.update_cadence == UpdateCadence::Phase {
                agent.update()?;
            }
            if cfg.variant.penalizes() {
                let feats = penalize(&work, &sol, &mut ps);
                penalty_events += 1;
                if cfg.record_events {
                    let edges = feats.iter().map(|f| (f.edge.0, f.edge.1, ps.get(f.edge.0, f.edge.1))).collect();
                    events.push(Event {
                        step: steps,
                        kind: EventKind::Penalty { edges },
                        delta_true: 0.0,
                        current: now,
                        best: best_cost,
                    });
                }
            }
            idle_phases = if phase_new_best { 0 } else { idle_phases + 1 };
            stall = 0;
            phase_first = now;
            phase_new_best = false;
            if cfg.max_idle_phases.is_some_and(|m| idle_phases >= m) {
                break;
            }
        }
    }
    agent.end_phase(&mut traj, cfg.reward, phase_first, sol.cost());
    agent.update()?;
    if let Agent::Train { updates, .. } = &agent {
        *updates_out = *updates;
    }
    if trace.last().is_none_or(|t| t.step != steps) {
        trace.push(TracePoint { step: steps, current: sol.cost(), best: best_cost });
    }

    let violations = validate(&work, &best);
    if !violations.is_empty() {
        return Err(SearchError::Infeasible(violations));
    }
    Ok(SearchResult {
        best_cost: best.raw_cost(&work),
        best_solution: best,
        best_cost_working: best_cost,
        initial_cost_working: initial_cost,
        trace,
        events,
        wall_time: started.elapsed().as_secs_f64(),
        steps_executed: steps,
        penalty_events,
        phases,
        penalties: ps.snapshot(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub episode: usize,
    pub instance_seed: u64,
    /// Best cost in working units.
    pub best_cost: f64,
    pub updates: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub episodes: Vec<EpisodeLog>,
}

/// Trains a fresh policy on `episodes` random instances of `n` nodes
/// (customers for CVRP).
pub fn train(
    kind: ProblemKind,
    n: usize,
    config: &SearchConfig,
    episodes: usize,
) -> Result<(Policy, TrainLog), SearchError> {
    let pc = PolicyConfig::new(kind, ActionCatalog::full().len());
    let mut policy = Policy::new(pc, split_seed(config.seed, 0x5eed))?;
    let log = train_policy(&mut policy, kind, n, config, episodes)?;
    Ok((policy, log))
}

/// Continues training an existing policy.
pub fn train_policy(
    policy: &mut Policy,
    kind: ProblemKind,
    n: usize,
    config: &SearchConfig,
    episodes: usize,
) -> Result<TrainLog, SearchError> {
    if episodes == 0 {
        return Err(SearchError::InvalidArgument("episodes must be positive".into()));
    }
    let mut log = TrainLog::default();
    for ep in 0..episodes {
        let instance_seed = split_seed(config.seed, 2 * ep as u64);
        let inst = match kind {
            ProblemKind::Tsp => generate_uniform_tsp(n, instance_seed)?,
            ProblemKind::Cvrp => generate_cvrp(&GenSpec::uniform(n, instance_seed))?,
        };
        let run_cfg = SearchConfig {
            seed: split_seed(config.seed, 2 * ep as u64 + 1),
            record_events: false,
            ..config.clone()
        };
        let (result, updates) = solve_training(&inst, &run_cfg, policy)?;
        log.episodes.push(EpisodeLog { episode: ep, instance_seed, best_cost: result.best_cost_working, updates });
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::DistanceMode;

    #[test]
    fn local_min_threshold() {
        assert!(!detect_local_min(5, 6));
        assert!(detect_local_min(6, 6));
        assert!(!detect_local_min(0, 6));
    }

    #[test]
    fn catalog_and_masks() {
        let c = ActionCatalog::full();
        assert_eq!(c.len(), 7);
        let m2 = c.mask(Variant::L2gls2);
        assert!(c.actions().iter().zip(&m2).all(|(a, &ok)| ok == (a.op != OperatorKind::ThreePerm)));
        let m3 = c.mask(Variant::L2gls3);
        assert!(c.actions().iter().zip(&m3).all(|(a, &ok)| ok == (a.op != OperatorKind::Relocate)));
        assert!(c.mask(Variant::NoPenalty).iter().all(|&b| b));
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("l2gls3".parse::<Variant>().unwrap(), Variant::L2gls3);
        assert_eq!("NO_PENALTY".parse::<Variant>().unwrap(), Variant::NoPenalty);
        assert_eq!("no-relocate".parse::<Variant>().unwrap(), Variant::L2gls3);
        assert!("bogus".parse::<Variant>().is_err());
    }

    #[test]
    fn config_validation() {
        let bad = SearchConfig { epsilon: 1.5, ..SearchConfig::default() };
        assert!(bad.validate().is_err());
        let bad = SearchConfig { stall_threshold: 0, ..SearchConfig::default() };
        assert!(bad.validate().is_err());
        assert!(SearchConfig::default().validate().is_ok());
    }

    #[test]
    fn square_reaches_perimeter() {
        let inst = RoutingInstance::tsp(
            "sq",
            vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]],
            DistanceMode::EuclidReal,
        )
        .unwrap();
        let cfg = SearchConfig { max_steps: 200, seed: 3, max_idle_phases: Some(5), ..SearchConfig::default() };
        let r = solve(&inst, &cfg, None).unwrap();
        assert!((r.best_cost - 4.0).abs() < 1e-9);
        assert!(r.steps_executed < 200);
    }

    #[test]
    fn no_penalty_variant_has_no_penalty_events() {
        let inst = generate_uniform_tsp(15, 2).unwrap();
        let cfg = SearchConfig { max_steps: 500, variant: Variant::NoPenalty, seed: 1, ..SearchConfig::default() };
        let r = solve(&inst, &cfg, None).unwrap();
        assert_eq!(r.penalty_events, 0);
        assert!(r.events.iter().all(|e| !matches!(e.kind, EventKind::Penalty { .. })));
        assert!(r.penalties.is_empty());
    }

    #[test]
    fn train_rejects_zero_episodes() {
        let cfg = SearchConfig { max_steps: 10, ..SearchConfig::default() };
        assert!(matches!(train(ProblemKind::Tsp, 8, &cfg, 0), Err(SearchError::InvalidArgument(_))));
    }

    #[test]
    fn update_cadence() {
        let inst = generate_uniform_tsp(12, 3).unwrap();
        let fresh = || Policy::new(PolicyConfig::new(ProblemKind::Tsp, 7), 1).unwrap();
        let base = SearchConfig { max_steps: 400, record_events: false, ..SearchConfig::default() };

        let mut p = fresh();
        let (r, updates) = solve_training(&inst, &base, &mut p).unwrap();
        assert!(r.phases > 1);
        assert_eq!(updates, 1);
        assert_ne!(p.params(), fresh().params());

        // per-phase advantage updates see a constant reward: no step is taken
        let phase = SearchConfig { update_cadence: UpdateCadence::Phase, ..base.clone() };
        let mut p = fresh();
        let (r, updates) = solve_training(&inst, &phase, &mut p).unwrap();
        assert_eq!(updates, r.phases + 1);
        assert_eq!(p.params(), fresh().params());

        let binary = SearchConfig { reward: RewardVariant::Binary, ..phase };
        let mut p = fresh();
        solve_training(&inst, &binary, &mut p).unwrap();
        assert_ne!(p.params(), fresh().params());
    }
}
