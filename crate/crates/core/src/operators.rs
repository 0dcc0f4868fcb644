//! Local-search operators with incremental delta evaluation.
//!
//! Every operator scans a neighbourhood restricted by k-nearest-neighbour
//! candidate lists and returns its best move against the augmented objective
//! `h`, or nothing when no move lowers `h` by more than [`IMPROVE_EPS`].
//! Moves record the solution generation they were built against;
//! [`apply_move`] refuses stale moves.
//!
//! For CVRP, 2-opt and three-permutation act inside one route while relocate
//! and swap may cross routes when capacity allows. Relocation never opens a
//! new route; a route emptied by relocation is dropped.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gls::PenaltyState;
use crate::instance::RoutingInstance;
use crate::solution::{RouteSet, Solution, Tour};

/// A move must lower `h` by more than this to be returned.
pub const IMPROVE_EPS: f64 = 1e-9;

/// Candidate-list length used when none is configured.
pub const DEFAULT_K: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("stale move: built against generation {move_generation}, solution is at {solution_generation}")]
    StaleMove { move_generation: u64, solution_generation: u64 },
    #[error("move does not fit the solution: {0}")]
    InvalidMove(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OperatorKind {
    TwoOpt,
    Relocate,
    Swap,
    ThreePerm,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 4] =
        [OperatorKind::TwoOpt, OperatorKind::Relocate, OperatorKind::Swap, OperatorKind::ThreePerm];

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::TwoOpt => "TWO_OPT",
            OperatorKind::Relocate => "RELOCATE",
            OperatorKind::Swap => "SWAP",
            OperatorKind::ThreePerm => "THREE_PERM",
        }
    }
}

impl std::fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Operator-specific move parameters. Positions index a tour's `order` or a
/// route's customer vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MoveParams {
    /// Reverse positions `from..=to` (wrapping around for tours).
    TwoOpt { route: usize, from: usize, to: usize },
    /// Take `node` out and reinsert it in `to_route` right after `after`
    /// (`None` means right after the depot).
    Relocate { node: usize, to_route: usize, after: Option<usize> },
    /// Exchange the positions of two nodes.
    Swap { a: usize, b: usize },
    /// Write `nodes` into positions `start..start+3` (wrapping for tours).
    ThreePerm { route: usize, start: usize, nodes: [usize; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Move {
    pub op: OperatorKind,
    pub params: MoveParams,
    /// Change in the true cost `L`.
    pub delta_true: f64,
    /// Change in the augmented cost `h`.
    pub delta_aug: f64,
    pub generation: u64,
}

/// Per-node k-nearest-neighbour lists, nearest first.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateLists {
    k: usize,
    lists: Vec<Vec<usize>>,
}

impl CandidateLists {
    /// Exact k-nearest lists by instance distance; ties broken by node id.
    pub fn build(inst: &RoutingInstance, k: usize) -> Result<Self, OperatorError> {
        let n = inst.len();
        if k == 0 || k >= n {
            return Err(OperatorError::InvalidArgument(format!("candidate k = {k} must lie in 1..{n}")));
        }
        let lists = (0..n)
            .map(|i| {
                let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                others.sort_by(|&a, &b| inst.dist(i, a).total_cmp(&inst.dist(i, b)).then(a.cmp(&b)));
                others.truncate(k);
                others
            })
            .collect();
        Ok(CandidateLists { k, lists })
    }

    /// `k = N - 1` for up to 20 nodes, otherwise [`DEFAULT_K`].
    pub fn default_k(n: usize) -> usize {
        if n <= 20 {
            n.saturating_sub(1).max(1)
        } else {
            DEFAULT_K.min(n - 1)
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn of(&self, i: usize) -> &[usize] {
        &self.lists[i]
    }

    fn near(&self, i: usize, width: usize) -> &[usize] {
        let l = &self.lists[i];
        &l[..width.min(l.len())]
    }

    fn related(&self, a: usize, b: usize, width: usize) -> bool {
        self.near(a, width).contains(&b) || self.near(b, width).contains(&a)
    }
}

/// Everything an operator needs to score moves.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext<'a> {
    pub inst: &'a RoutingInstance,
    pub penalties: &'a PenaltyState,
    pub cands: &'a CandidateLists,
    /// How many entries of each candidate list to use.
    pub width: usize,
}

impl<'a> EvalContext<'a> {
    pub fn new(inst: &'a RoutingInstance, penalties: &'a PenaltyState, cands: &'a CandidateLists) -> Self {
        EvalContext { inst, penalties, cands, width: cands.k() }
    }

    pub fn with_width(self, width: usize) -> Self {
        EvalContext { width: width.max(1), ..self }
    }

    #[inline]
    fn d(&self, a: usize, b: usize) -> f64 {
        self.inst.dist(a, b)
    }

    #[inline]
    fn p(&self, a: usize, b: usize) -> i64 {
        i64::from(self.penalties.get(a, b))
    }

    fn make(&self, op: OperatorKind, params: MoveParams, delta_true: f64, dp: i64, generation: u64) -> Move {
        let delta_aug = if dp == 0 { delta_true } else { delta_true + self.penalties.lambda() * dp as f64 };
        Move { op, params, delta_true, delta_aug, generation }
    }
}

/// Accumulates `(d, p)` changes of added minus removed edges.
#[derive(Default, Clone, Copy)]
struct EdgeDelta {
    d: f64,
    p: i64,
}

impl EdgeDelta {
    #[inline]
    fn add(&mut self, ctx: &EvalContext, a: usize, b: usize) {
        self.d += ctx.d(a, b);
        self.p += ctx.p(a, b);
    }

    #[inline]
    fn remove(&mut self, ctx: &EvalContext, a: usize, b: usize) {
        self.d -= ctx.d(a, b);
        self.p -= ctx.p(a, b);
    }
}

/// Delta of overwriting a few positions of a cyclic sequence.
fn cyclic_delta(ctx: &EvalContext, order: &[usize], changes: &[(usize, usize)]) -> EdgeDelta {
    let n = order.len();
    let at_new = |q: usize| changes.iter().find(|c| c.0 == q).map_or(order[q], |c| c.1);
    let mut starts: [usize; 8] = [usize::MAX; 8];
    let mut len = 0;
    for &(p, _) in changes {
        for e in [(p + n - 1) % n, p] {
            if !starts[..len].contains(&e) {
                starts[len] = e;
                len += 1;
            }
        }
    }
    let mut delta = EdgeDelta::default();
    for &e in &starts[..len] {
        let f = (e + 1) % n;
        delta.remove(ctx, order[e], order[f]);
        delta.add(ctx, at_new(e), at_new(f));
    }
    delta
}

/// Delta of overwriting customer positions of one route. `changes` use
/// customer indices; the depot pads both ends.
fn route_delta(ctx: &EvalContext, route: &[usize], changes: &[(usize, usize)]) -> EdgeDelta {
    let len = route.len();
    let at_old = |q: usize| if q == 0 || q == len + 1 { 0 } else { route[q - 1] };
    let at_new = |q: usize| changes.iter().find(|c| c.0 + 1 == q).map_or(at_old(q), |c| c.1);
    let mut starts: [usize; 8] = [usize::MAX; 8];
    let mut count = 0;
    for &(p, _) in changes {
        for e in [p, p + 1] {
            if !starts[..count].contains(&e) {
                starts[count] = e;
                count += 1;
            }
        }
    }
    let mut delta = EdgeDelta::default();
    for &e in &starts[..count] {
        delta.remove(ctx, at_old(e), at_old(e + 1));
        delta.add(ctx, at_new(e), at_new(e + 1));
    }
    delta
}

fn route_node(route: &[usize], q: usize) -> usize {
    if q == 0 || q == route.len() + 1 {
        0
    } else {
        route[q - 1]
    }
}

fn gen_two_opt(sol: &Solution, ctx: &EvalContext, full: bool, sink: &mut impl FnMut(Move)) {
    let op = OperatorKind::TwoOpt;
    match sol {
        Solution::Tour(t) => {
            let n = t.len();
            let mut consider = |i: usize, j: usize| {
                let (si, sj) = (t.succ(i), t.succ(j));
                if i == j || j == si || i == sj {
                    return;
                }
                let mut e = EdgeDelta::default();
                e.remove(ctx, i, si);
                e.remove(ctx, j, sj);
                e.add(ctx, i, j);
                e.add(ctx, si, sj);
                let params = MoveParams::TwoOpt { route: 0, from: t.position(si), to: t.position(j) };
                sink(ctx.make(op, params, e.d, e.p, t.generation));
            };
            if full {
                for pi in 0..n {
                    for pj in (pi + 2)..n {
                        consider(t.order[pi], t.order[pj]);
                    }
                }
            } else {
                for a in 0..n {
                    for &c in ctx.cands.near(a, ctx.width) {
                        consider(a, c);
                        consider(t.pred(a), t.pred(c));
                    }
                }
            }
        }
        Solution::Routes(rs) => {
            for (r, route) in rs.routes.iter().enumerate() {
                let len = route.len();
                for p in 0..len.saturating_sub(1) {
                    for q in (p + 2)..=len {
                        let (a, b) = (route_node(route, p), route_node(route, p + 1));
                        let (c, d) = (route_node(route, q), route_node(route, q + 1));
                        if !full && !ctx.cands.related(a, c, ctx.width) && !ctx.cands.related(b, d, ctx.width) {
                            continue;
                        }
                        let mut e = EdgeDelta::default();
                        e.remove(ctx, a, b);
                        e.remove(ctx, c, d);
                        e.add(ctx, a, c);
                        e.add(ctx, b, d);
                        let params = MoveParams::TwoOpt { route: r, from: p, to: q - 1 };
                        sink(ctx.make(op, params, e.d, e.p, rs.generation));
                    }
                }
            }
        }
    }
}

fn gen_relocate(sol: &Solution, ctx: &EvalContext, full: bool, sink: &mut impl FnMut(Move)) {
    let op = OperatorKind::Relocate;
    match sol {
        Solution::Tour(t) => {
            let n = t.len();
            for u in 0..n {
                let (x, y) = (t.pred(u), t.succ(u));
                let mut base = EdgeDelta::default();
                base.add(ctx, x, y);
                base.remove(ctx, x, u);
                base.remove(ctx, u, y);
                let mut consider = |v: usize| {
                    if v == u || v == x {
                        return;
                    }
                    let w = t.succ(v);
                    let mut e = base;
                    e.add(ctx, v, u);
                    e.add(ctx, u, w);
                    e.remove(ctx, v, w);
                    let params = MoveParams::Relocate { node: u, to_route: 0, after: Some(v) };
                    sink(ctx.make(op, params, e.d, e.p, t.generation));
                };
                if full {
                    (0..n).for_each(&mut consider);
                } else {
                    for &c in ctx.cands.near(u, ctx.width) {
                        consider(c);
                        consider(t.pred(c));
                    }
                }
            }
        }
        Solution::Routes(rs) => {
            let cap = u64::from(ctx.inst.capacity());
            for u in ctx.inst.movable_nodes() {
                let (ru, _) = rs.locate[u];
                let (x, y) = (rs.pred(u), rs.succ(u));
                let g = u64::from(ctx.inst.demand(u));
                let mut base = EdgeDelta::default();
                base.add(ctx, x, y);
                base.remove(ctx, x, u);
                base.remove(ctx, u, y);
                // slot = (route, padded position q): insert between q and q+1
                let mut consider = |r: usize, q: usize| {
                    let route = &rs.routes[r];
                    let (v, w) = (route_node(route, q), route_node(route, q + 1));
                    if v == u || w == u || (r != ru && rs.loads[r] + g > cap) {
                        return;
                    }
                    let mut e = base;
                    e.add(ctx, v, u);
                    e.add(ctx, u, w);
                    e.remove(ctx, v, w);
                    let after = if q == 0 { None } else { Some(v) };
                    let params = MoveParams::Relocate { node: u, to_route: r, after };
                    sink(ctx.make(op, params, e.d, e.p, rs.generation));
                };
                if full {
                    for (r, route) in rs.routes.iter().enumerate() {
                        for q in 0..=route.len() {
                            consider(r, q);
                        }
                    }
                } else {
                    for &c in ctx.cands.near(u, ctx.width) {
                        if c == 0 {
                            for (r, route) in rs.routes.iter().enumerate() {
                                consider(r, 0);
                                consider(r, route.len());
                            }
                        } else {
                            let (r, p) = rs.locate[c];
                            consider(r, p);
                            consider(r, p + 1);
                        }
                    }
                }
            }
        }
    }
}

fn gen_swap(sol: &Solution, ctx: &EvalContext, full: bool, sink: &mut impl FnMut(Move)) {
    let op = OperatorKind::Swap;
    match sol {
        Solution::Tour(t) => {
            let n = t.len();
            let mut consider = |a: usize, b: usize| {
                if a == b {
                    return;
                }
                let (pa, pb) = (t.position(a), t.position(b));
                let e = cyclic_delta(ctx, &t.order, &[(pa, b), (pb, a)]);
                sink(ctx.make(op, MoveParams::Swap { a, b }, e.d, e.p, t.generation));
            };
            if full {
                for a in 0..n {
                    for b in (a + 1)..n {
                        consider(a, b);
                    }
                }
            } else {
                for a in 0..n {
                    for &c in ctx.cands.near(a, ctx.width) {
                        consider(a, c);
                        consider(a, t.pred(c));
                        consider(a, t.succ(c));
                    }
                }
            }
        }
        Solution::Routes(rs) => {
            let cap = u64::from(ctx.inst.capacity());
            let mut consider = |a: usize, b: usize| {
                if a == b || a == 0 || b == 0 {
                    return;
                }
                let (ra, pa) = rs.locate[a];
                let (rb, pb) = rs.locate[b];
                let e = if ra == rb {
                    route_delta(ctx, &rs.routes[ra], &[(pa, b), (pb, a)])
                } else {
                    let (ga, gb) = (u64::from(ctx.inst.demand(a)), u64::from(ctx.inst.demand(b)));
                    if rs.loads[ra] - ga + gb > cap || rs.loads[rb] - gb + ga > cap {
                        return;
                    }
                    let mut e = route_delta(ctx, &rs.routes[ra], &[(pa, b)]);
                    let e2 = route_delta(ctx, &rs.routes[rb], &[(pb, a)]);
                    e.d += e2.d;
                    e.p += e2.p;
                    e
                };
                sink(ctx.make(op, MoveParams::Swap { a, b }, e.d, e.p, rs.generation));
            };
            let customers = ctx.inst.movable_nodes();
            if full {
                for a in customers.clone() {
                    for b in (a + 1)..customers.end {
                        consider(a, b);
                    }
                }
            } else {
                for a in customers {
                    for &c in ctx.cands.near(a, ctx.width) {
                        if c == 0 {
                            continue;
                        }
                        consider(a, c);
                        consider(a, rs.pred(c));
                        consider(a, rs.succ(c));
                    }
                }
            }
        }
    }
}

/// The five non-identity orders of `[x, y, z]`.
fn reorders(x: usize, y: usize, z: usize) -> [[usize; 3]; 5] {
    [[x, z, y], [y, x, z], [y, z, x], [z, x, y], [z, y, x]]
}

fn gen_three_perm(sol: &Solution, ctx: &EvalContext, sink: &mut impl FnMut(Move)) {
    let op = OperatorKind::ThreePerm;
    match sol {
        Solution::Tour(t) => {
            let n = t.len();
            for s in 0..n {
                let pos = [s, (s + 1) % n, (s + 2) % n];
                let [x, y, z] = pos.map(|p| t.order[p]);
                for nodes in reorders(x, y, z) {
                    let changes = [(pos[0], nodes[0]), (pos[1], nodes[1]), (pos[2], nodes[2])];
                    let e = cyclic_delta(ctx, &t.order, &changes);
                    let params = MoveParams::ThreePerm { route: 0, start: s, nodes };
                    sink(ctx.make(op, params, e.d, e.p, t.generation));
                }
            }
        }
        Solution::Routes(rs) => {
            for (r, route) in rs.routes.iter().enumerate() {
                for s in 0..route.len().saturating_sub(2) {
                    let (x, y, z) = (route[s], route[s + 1], route[s + 2]);
                    for nodes in reorders(x, y, z) {
                        let changes = [(s, nodes[0]), (s + 1, nodes[1]), (s + 2, nodes[2])];
                        let e = route_delta(ctx, route, &changes);
                        let params = MoveParams::ThreePerm { route: r, start: s, nodes };
                        sink(ctx.make(op, params, e.d, e.p, rs.generation));
                    }
                }
            }
        }
    }
}

fn generate(op: OperatorKind, sol: &Solution, ctx: &EvalContext, full: bool, sink: &mut impl FnMut(Move)) {
    match op {
        OperatorKind::TwoOpt => gen_two_opt(sol, ctx, full, sink),
        OperatorKind::Relocate => gen_relocate(sol, ctx, full, sink),
        OperatorKind::Swap => gen_swap(sol, ctx, full, sink),
        OperatorKind::ThreePerm => gen_three_perm(sol, ctx, sink),
    }
}

/// Every move of `op` the operator would consider. With `full`, candidate
/// lists are ignored and the whole neighbourhood is listed.
pub fn neighbourhood(op: OperatorKind, sol: &Solution, ctx: &EvalContext, full: bool) -> Vec<Move> {
    let mut out = Vec::new();
    generate(op, sol, ctx, full, &mut |m| out.push(m));
    out
}

/// Best improving move of `op` within the candidate-restricted neighbourhood.
pub fn best_move(op: OperatorKind, sol: &Solution, ctx: &EvalContext) -> Option<Move> {
    let mut best: Option<Move> = None;
    let mut threshold = -IMPROVE_EPS;
    generate(op, sol, ctx, false, &mut |m| {
        if m.delta_aug < threshold {
            threshold = m.delta_aug;
            best = Some(m);
        }
    });
    best
}

pub fn two_opt_best(sol: &Solution, ctx: &EvalContext) -> Option<Move> {
    best_move(OperatorKind::TwoOpt, sol, ctx)
}

pub fn relocate_best(sol: &Solution, ctx: &EvalContext) -> Option<Move> {
    best_move(OperatorKind::Relocate, sol, ctx)
}

pub fn swap_best(sol: &Solution, ctx: &EvalContext) -> Option<Move> {
    best_move(OperatorKind::Swap, sol, ctx)
}

pub fn three_perm_best(sol: &Solution, ctx: &EvalContext) -> Option<Move> {
    best_move(OperatorKind::ThreePerm, sol, ctx)
}

/// Applies `m` and adds its `delta_true` to the cached cost.
pub fn apply_move(inst: &RoutingInstance, sol: &mut Solution, m: &Move) -> Result<(), OperatorError> {
    if m.generation != sol.generation() {
        return Err(OperatorError::StaleMove { move_generation: m.generation, solution_generation: sol.generation() });
    }
    match sol {
        Solution::Tour(t) => apply_tour(t, m)?,
        Solution::Routes(rs) => apply_routes(inst, rs, m)?,
    }
    sol.bump_generation();
    Ok(())
}

fn bad(m: &Move) -> OperatorError {
    OperatorError::InvalidMove(format!("{:?}", m.params))
}

fn apply_tour(t: &mut Tour, m: &Move) -> Result<(), OperatorError> {
    let n = t.order.len();
    match m.params {
        MoveParams::TwoOpt { from, to, .. } => {
            if from >= n || to >= n {
                return Err(bad(m));
            }
            let len = (to + n - from) % n + 1;
            let (mut i, mut j, len) =
                if 2 * len > n { ((to + 1) % n, (from + n - 1) % n, n - len) } else { (from, to, len) };
            for _ in 0..len / 2 {
                t.order.swap(i, j);
                t.pos[t.order[i]] = i;
                t.pos[t.order[j]] = j;
                i = (i + 1) % n;
                j = (j + n - 1) % n;
            }
        }
        MoveParams::Relocate { node, after: Some(v), .. } => {
            if node >= n || v >= n || node == v {
                return Err(bad(m));
            }
            let (pu, pv) = (t.pos[node], t.pos[v]);
            if pu < pv {
                t.order.copy_within(pu + 1..=pv, pu);
                t.order[pv] = node;
                for p in pu..=pv {
                    t.pos[t.order[p]] = p;
                }
            } else {
                t.order.copy_within(pv + 1..pu, pv + 2);
                t.order[pv + 1] = node;
                for p in pv + 1..=pu {
                    t.pos[t.order[p]] = p;
                }
            }
        }
        MoveParams::Swap { a, b } => {
            if a >= n || b >= n {
                return Err(bad(m));
            }
            let (pa, pb) = (t.pos[a], t.pos[b]);
            t.order.swap(pa, pb);
            t.pos[a] = pb;
            t.pos[b] = pa;
        }
        MoveParams::ThreePerm { start, nodes, .. } => {
            if start >= n {
                return Err(bad(m));
            }
            for (k, &v) in nodes.iter().enumerate() {
                let p = (start + k) % n;
                t.order[p] = v;
                t.pos[v] = p;
            }
        }
        MoveParams::Relocate { after: None, .. } => return Err(bad(m)),
    }
    t.cost += m.delta_true;
    Ok(())
}

fn apply_routes(inst: &RoutingInstance, rs: &mut RouteSet, m: &Move) -> Result<(), OperatorError> {
    let nroutes = rs.routes.len();
    match m.params {
        MoveParams::TwoOpt { route, from, to } => {
            if route >= nroutes || from > to || to >= rs.routes[route].len() {
                return Err(bad(m));
            }
            rs.routes[route][from..=to].reverse();
            rs.reindex_route(route);
        }
        MoveParams::Relocate { node, to_route, after } => {
            let (ru, pu) = rs.locate(node).ok_or_else(|| bad(m))?;
            if to_route >= nroutes {
                return Err(bad(m));
            }
            rs.routes[ru].remove(pu);
            let g = u64::from(inst.demand(node));
            rs.loads[ru] -= g;
            rs.loads[to_route] += g;
            let insert_at = match after {
                None => 0,
                Some(v) => rs.routes[to_route].iter().position(|&x| x == v).ok_or_else(|| bad(m))? + 1,
            };
            rs.routes[to_route].insert(insert_at, node);
            if rs.routes[ru].is_empty() {
                rs.routes.remove(ru);
                rs.rebuild_index(inst);
            } else {
                rs.reindex_route(ru);
                rs.reindex_route(to_route);
            }
        }
        MoveParams::Swap { a, b } => {
            let (ra, pa) = rs.locate(a).ok_or_else(|| bad(m))?;
            let (rb, pb) = rs.locate(b).ok_or_else(|| bad(m))?;
            rs.routes[ra][pa] = b;
            rs.routes[rb][pb] = a;
            rs.locate[a] = (rb, pb);
            rs.locate[b] = (ra, pa);
            if ra != rb {
                let (ga, gb) = (u64::from(inst.demand(a)), u64::from(inst.demand(b)));
                rs.loads[ra] = rs.loads[ra] - ga + gb;
                rs.loads[rb] = rs.loads[rb] - gb + ga;
            }
        }
        MoveParams::ThreePerm { route, start, nodes } => {
            if route >= nroutes || start + 3 > rs.routes[route].len() {
                return Err(bad(m));
            }
            rs.routes[route][start..start + 3].copy_from_slice(&nodes);
            rs.reindex_route(route);
        }
    }
    rs.cost += m.delta_true;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gls::augmented_cost;
    use crate::instance::{generate_cvrp, generate_uniform_tsp, DistanceMode, GenSpec};
    use crate::solution::{initial_solution, validate};

    fn collinear() -> RoutingInstance {
        RoutingInstance::tsp(
            "line",
            vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]],
            DistanceMode::EuclidReal,
        )
        .unwrap()
    }

    #[test]
    fn candidate_lists() {
        let sq = RoutingInstance::tsp(
            "sq",
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.1], [0.0, 1.1]],
            DistanceMode::EuclidReal,
        )
        .unwrap();
        let c = CandidateLists::build(&sq, 1).unwrap();
        assert_eq!(c.of(0), &[1]);
        assert_eq!(c.of(2), &[3]);
        let all = CandidateLists::build(&sq, 3).unwrap();
        assert_eq!(all.of(0), &[1, 3, 2]);
        assert!(CandidateLists::build(&sq, 4).is_err());
        assert!(CandidateLists::build(&sq, 0).is_err());
        assert_eq!(CandidateLists::default_k(20), 19);
        assert_eq!(CandidateLists::default_k(50), 10);
    }

    #[test]
    fn collinear_two_opt() {
        let inst = collinear();
        let cands = CandidateLists::build(&inst, 3).unwrap();
        let ps = PenaltyState::new(0.3);
        let ctx = EvalContext::new(&inst, &ps, &cands);
        let mut sol = Solution::Tour(Tour::new(&inst, vec![0, 2, 1, 3]).unwrap());
        let m = two_opt_best(&sol, &ctx).unwrap();
        assert!((m.delta_true + 2.0).abs() < 1e-12);
        apply_move(&inst, &mut sol, &m).unwrap();
        assert!((sol.cost() - 6.0).abs() < 1e-12);
        let order = sol.as_tour().unwrap().order().to_vec();
        // 0,1,2,3 up to rotation and direction
        let canon: Vec<usize> = (0..4).map(|k| order[(order.iter().position(|&v| v == 0).unwrap() + k) % 4]).collect();
        assert!(canon == vec![0, 1, 2, 3] || canon == vec![0, 3, 2, 1]);
    }

    #[test]
    fn convex_hull_has_no_two_opt() {
        let inst = RoutingInstance::tsp(
            "hex",
            (0..6).map(|i| {
                let a = i as f64 * std::f64::consts::TAU / 6.0;
                [a.cos(), a.sin()]
            })
            .collect(),
            DistanceMode::EuclidReal,
        )
        .unwrap();
        let cands = CandidateLists::build(&inst, 5).unwrap();
        let ps = PenaltyState::new(0.3);
        let ctx = EvalContext::new(&inst, &ps, &cands);
        let sol = Solution::Tour(Tour::new(&inst, (0..6).collect()).unwrap());
        assert!(two_opt_best(&sol, &ctx).is_none());
    }

    #[test]
    fn penalty_forces_edge_out() {
        let inst = RoutingInstance::tsp(
            "sq",
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            DistanceMode::EuclidReal,
        )
        .unwrap();
        let cands = CandidateLists::build(&inst, 3).unwrap();
        let mut ps = PenaltyState::new(0.3);
        ps.set(0, 1, 10);
        let ctx = EvalContext::new(&inst, &ps, &cands);
        let mut sol = Solution::Tour(Tour::new(&inst, vec![0, 1, 2, 3]).unwrap());
        let m = two_opt_best(&sol, &ctx).unwrap();
        assert!(m.delta_true > 0.0);
        let h0 = augmented_cost(&sol, &ps);
        apply_move(&inst, &mut sol, &m).unwrap();
        assert_eq!(crate::gls::traversals(&sol, 0, 1), 0);
        assert!((augmented_cost(&sol, &ps) - h0 - m.delta_aug).abs() < 1e-9);
        assert!((sol.recompute_cost(&inst) - sol.cost()).abs() < 1e-12);
    }

    #[test]
    fn stale_move_rejected() {
        let inst = collinear();
        let cands = CandidateLists::build(&inst, 3).unwrap();
        let ps = PenaltyState::new(0.3);
        let ctx = EvalContext::new(&inst, &ps, &cands);
        let mut sol = Solution::Tour(Tour::new(&inst, vec![0, 2, 1, 3]).unwrap());
        let m = two_opt_best(&sol, &ctx).unwrap();
        apply_move(&inst, &mut sol, &m).unwrap();
        assert!(matches!(apply_move(&inst, &mut sol, &m), Err(OperatorError::StaleMove { .. })));
    }

    #[test]
    fn relocate_none_when_neighbours_nearest() {
        let inst = collinear();
        let cands = CandidateLists::build(&inst, 3).unwrap();
        let ps = PenaltyState::new(0.3);
        let ctx = EvalContext::new(&inst, &ps, &cands);
        let sol = Solution::Tour(Tour::new(&inst, vec![0, 1, 2, 3]).unwrap());
        assert!(relocate_best(&sol, &ctx).is_none());
    }

    #[test]
    fn three_perm_fixes_window() {
        let inst = collinear();
        let cands = CandidateLists::build(&inst, 3).unwrap();
        let ps = PenaltyState::new(0.3);
        let ctx = EvalContext::new(&inst, &ps, &cands);
        let mut sol = Solution::Tour(Tour::new(&inst, vec![0, 2, 1, 3]).unwrap());
        let m = three_perm_best(&sol, &ctx).unwrap();
        apply_move(&inst, &mut sol, &m).unwrap();
        assert!((sol.cost() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn swap_never_self() {
        let inst = generate_uniform_tsp(12, 3).unwrap();
        let cands = CandidateLists::build(&inst, 5).unwrap();
        let ps = PenaltyState::new(0.3);
        let ctx = EvalContext::new(&inst, &ps, &cands);
        let sol = initial_solution(&inst, 1);
        for full in [false, true] {
            for m in neighbourhood(OperatorKind::Swap, &sol, &ctx, full) {
                let MoveParams::Swap { a, b } = m.params else { unreachable!() };
                assert_ne!(a, b);
            }
        }
    }

    #[test]
    fn cvrp_moves_keep_capacity() {
        let inst = generate_cvrp(&GenSpec::uniform(20, 4)).unwrap();
        let cands = CandidateLists::build(&inst, 10).unwrap();
        let ps = PenaltyState::new(0.3);
        let ctx = EvalContext::new(&inst, &ps, &cands);
        let sol = initial_solution(&inst, 2);
        for op in OperatorKind::ALL {
            for m in neighbourhood(op, &sol, &ctx, true) {
                let mut s = sol.clone();
                apply_move(&inst, &mut s, &m).unwrap();
                assert!(validate(&inst, &s).is_empty(), "{m:?}");
                assert!((s.recompute_cost(&inst) - s.cost()).abs() < 1e-9, "{m:?}");
            }
        }
    }

    #[test]
    fn capacity_blocks_relocate() {
        // depot, two customers of demand 5 in one route (cap 8 leaves 3 free
        // elsewhere), one of demand 5 alone
        let inst = RoutingInstance::cvrp(
            "cap",
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 0.1], [0.0, 1.0], [0.1, 1.0]],
            vec![0, 5, 3, 5, 3],
            8,
            DistanceMode::EuclidReal,
        )
        .unwrap();
        let cands = CandidateLists::build(&inst, 4).unwrap();
        let ps = PenaltyState::new(0.3);
        let ctx = EvalContext::new(&inst, &ps, &cands);
        let sol = Solution::Routes(RouteSet::new(&inst, vec![vec![1, 2], vec![3, 4]]).unwrap());
        for m in neighbourhood(OperatorKind::Relocate, &sol, &ctx, true) {
            let MoveParams::Relocate { node, to_route, .. } = m.params else { unreachable!() };
            let (r, _) = sol.as_routes().unwrap().locate(node).unwrap();
            assert_eq!(r, to_route, "demand {} moved into a full route", inst.demand(node));
        }
    }
}
