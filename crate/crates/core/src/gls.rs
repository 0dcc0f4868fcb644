//! Guided-local-search penalties.
//!
//! Features are undirected edges. Each edge carries an integer penalty
//! `p_e` (absent means 0) and the search optimizes the augmented objective
//! `h = L + lambda * sum(p_e)` over the edges the solution traverses. At a
//! local minimum the edges of maximal utility `d_e / (1 + p_e)` are
//! penalized, all ties included. Penalties only ever grow within a run.

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::instance::RoutingInstance;
use crate::solution::Solution;

/// Default penalty weight, applied to unit-square coordinates.
pub const DEFAULT_LAMBDA: f64 = 0.3;

/// An undirected edge and its length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub edge: (usize, usize),
    pub cost: f64,
}

impl Feature {
    pub fn new(inst: &RoutingInstance, i: usize, j: usize) -> Self {
        Feature { edge: edge_key(i, j), cost: inst.dist(i, j) }
    }
}

#[inline]
pub fn edge_key(i: usize, j: usize) -> (usize, usize) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyState {
    penalties: FxHashMap<(usize, usize), u32>,
    lambda: f64,
}

impl PenaltyState {
    pub fn new(lambda: f64) -> Self {
        PenaltyState { penalties: FxHashMap::default(), lambda }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        if self.penalties.is_empty() {
            return 0;
        }
        self.penalties.get(&edge_key(i, j)).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.penalties.is_empty()
    }

    /// Sets a penalty directly; zero evicts the entry.
    pub fn set(&mut self, i: usize, j: usize, p: u32) {
        if p == 0 {
            self.penalties.remove(&edge_key(i, j));
        } else {
            self.penalties.insert(edge_key(i, j), p);
        }
    }

    /// Number of distinct edges with a positive penalty.
    pub fn num_features_penalized(&self) -> usize {
        self.penalties.len()
    }

    /// Sum of penalties over every traversal in `sol`.
    pub fn penalty_sum(&self, sol: &Solution) -> u64 {
        if self.penalties.is_empty() {
            return 0;
        }
        sol.edges().iter().map(|&(a, b)| u64::from(self.get(a, b))).sum()
    }

    /// `(i, j, p)` triples sorted by edge.
    pub fn snapshot(&self) -> Vec<(usize, usize, u32)> {
        let mut out: Vec<_> = self.penalties.iter().map(|(&(i, j), &p)| (i, j, p)).collect();
        out.sort_unstable();
        out
    }
}

/// Number of times `sol` traverses edge `(i, j)`. Only a CVRP route with a
/// single customer traverses an edge (its depot leg) twice.
pub fn traversals(sol: &Solution, i: usize, j: usize) -> usize {
    if i == j {
        return 0;
    }
    match sol {
        Solution::Tour(t) => {
            if i >= t.pos.len() || j >= t.pos.len() {
                return 0;
            }
            let n = t.len();
            usize::from(t.succ(i) == j) + usize::from(n > 2 && t.pred(i) == j)
        }
        Solution::Routes(rs) => {
            let (c, other) = if i == 0 { (j, i) } else { (i, j) };
            let Some(_) = rs.locate(c) else { return 0 };
            usize::from(rs.pred(c) == other) + usize::from(rs.succ(c) == other)
        }
    }
}

/// 1 when `sol` uses edge `f`, else 0.
pub fn indicator(sol: &Solution, f: &Feature) -> u8 {
    u8::from(traversals(sol, f.edge.0, f.edge.1) > 0)
}

/// `L + lambda * sum of penalties over traversed edges`.
pub fn augmented_cost(sol: &Solution, ps: &PenaltyState) -> f64 {
    sol.cost() + ps.lambda * ps.penalty_sum(sol) as f64
}

/// `I(sol, f) * d_f / (1 + p_f)`.
pub fn feature_utility(local_min: &Solution, ps: &PenaltyState, f: &Feature) -> f64 {
    if indicator(local_min, f) == 0 {
        return 0.0;
    }
    f.cost / (1.0 + f64::from(ps.get(f.edge.0, f.edge.1)))
}

/// Increments the penalty of every in-solution edge of maximal utility and
/// returns those edges sorted.
pub fn penalize(inst: &RoutingInstance, local_min: &Solution, ps: &mut PenaltyState) -> Vec<Feature> {
    let mut distinct: FxHashSet<(usize, usize)> = FxHashSet::default();
    let mut best = f64::NEG_INFINITY;
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    for (a, b) in local_min.edges() {
        let key = edge_key(a, b);
        if a == b || !distinct.insert(key) {
            continue;
        }
        let u = inst.dist(a, b) / (1.0 + f64::from(ps.get(a, b)));
        if u > best {
            best = u;
            chosen.clear();
            chosen.push(key);
        } else if u == best {
            chosen.push(key);
        }
    }
    chosen.sort_unstable();
    for &(i, j) in &chosen {
        *ps.penalties.entry((i, j)).or_insert(0) += 1;
    }
    chosen.into_iter().map(|(i, j)| Feature::new(inst, i, j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::DistanceMode;
    use crate::solution::{RouteSet, Tour};

    fn line() -> RoutingInstance {
        RoutingInstance::tsp("l", vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [4.0, 0.0]], DistanceMode::EuclidReal)
            .unwrap()
    }

    #[test]
    fn indicator_on_tour() {
        let inst = line();
        let sol = Solution::Tour(Tour::new(&inst, vec![0, 1, 2, 3]).unwrap());
        assert_eq!(indicator(&sol, &Feature::new(&inst, 1, 2)), 1);
        assert_eq!(indicator(&sol, &Feature::new(&inst, 3, 0)), 1);
        assert_eq!(indicator(&sol, &Feature::new(&inst, 0, 2)), 0);
    }

    #[test]
    fn indicator_on_routes() {
        let inst = RoutingInstance::cvrp(
            "c",
            vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0], [4.0, 0.0], [5.0, 0.0]],
            vec![0, 1, 1, 1, 1, 1],
            10,
            DistanceMode::EuclidReal,
        )
        .unwrap();
        let sol = Solution::Routes(RouteSet::new(&inst, vec![vec![3, 5], vec![1, 2, 4]]).unwrap());
        assert_eq!(indicator(&sol, &Feature::new(&inst, 0, 3)), 1);
        assert_eq!(indicator(&sol, &Feature::new(&inst, 5, 0)), 1);
        assert_eq!(indicator(&sol, &Feature::new(&inst, 3, 1)), 0);
        let singleton = Solution::Routes(RouteSet::new(&inst, vec![vec![3], vec![1, 2, 4, 5]]).unwrap());
        assert_eq!(traversals(&singleton, 0, 3), 2);
        assert_eq!(indicator(&singleton, &Feature::new(&inst, 3, 0)), 1);
    }

    #[test]
    fn augmented_cost_arithmetic() {
        let inst = line();
        let sol = Solution::Tour(Tour::new(&inst, vec![0, 1, 2, 3]).unwrap());
        let mut ps = PenaltyState::new(0.3);
        assert_eq!(augmented_cost(&sol, &ps), sol.cost());
        ps.set(2, 1, 2);
        assert!((augmented_cost(&sol, &ps) - (sol.cost() + 0.6)).abs() < 1e-12);
        ps.set(0, 2, 5);
        assert!((augmented_cost(&sol, &ps) - (sol.cost() + 0.6)).abs() < 1e-12);
    }

    #[test]
    fn utility_closed_form() {
        let inst = RoutingInstance::tsp("u", vec![[0.0, 0.0], [0.5, 0.0], [0.5, 0.5]], DistanceMode::EuclidReal).unwrap();
        let sol = Solution::Tour(Tour::new(&inst, vec![0, 1, 2]).unwrap());
        let mut ps = PenaltyState::new(0.3);
        let f = Feature::new(&inst, 0, 1);
        assert_eq!(feature_utility(&sol, &ps, &f), 0.5);
        ps.set(0, 1, 1);
        assert_eq!(feature_utility(&sol, &ps, &f), 0.25);
        let four = line();
        let tour = Solution::Tour(Tour::new(&four, vec![0, 1, 2, 3]).unwrap());
        assert_eq!(feature_utility(&tour, &ps, &Feature::new(&four, 0, 2)), 0.0);
    }

    #[test]
    fn penalize_longest_then_rotate() {
        let inst = line();
        let sol = Solution::Tour(Tour::new(&inst, vec![0, 1, 2, 3]).unwrap());
        let mut ps = PenaltyState::new(0.3);
        let first = penalize(&inst, &sol, &mut ps);
        assert_eq!(first.len(), 1);
        assert_eq!(first[0].edge, (0, 3));
        for _ in 0..5 {
            penalize(&inst, &sol, &mut ps);
        }
        assert!(ps.num_features_penalized() >= 2);
    }

    #[test]
    fn penalize_ties() {
        let inst = RoutingInstance::tsp(
            "sq",
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            DistanceMode::EuclidReal,
        )
        .unwrap();
        let sol = Solution::Tour(Tour::new(&inst, vec![0, 1, 2, 3]).unwrap());
        let mut ps = PenaltyState::new(0.3);
        assert_eq!(penalize(&inst, &sol, &mut ps).len(), 4);
        assert_eq!(ps.snapshot(), vec![(0, 1, 1), (0, 3, 1), (1, 2, 1), (2, 3, 1)]);
    }
}
