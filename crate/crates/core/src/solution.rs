//! Tours, route sets, the true objective, and feasibility checks.
//!
//! A [`Tour`] is a permutation of all nodes. A [`RouteSet`] lists customer
//! sequences; the depot (node 0) is implicit at both ends of every route and
//! never stored. Both carry a cached cost that operators update
//! incrementally, plus a generation counter bumped on every mutation so that
//! stale moves can be rejected.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{ProblemKind, RoutingInstance};
use crate::rng::rng_from_seed;

/// Marker stored in [`RouteSet`] lookups for nodes that sit in no route.
const NOWHERE: (usize, usize) = (usize::MAX, usize::MAX);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolutionError {
    #[error("infeasible solution: {0:?}")]
    Validation(Vec<Violation>),
    #[error("node {0} is not a customer in any route")]
    Lookup(usize),
    #[error("solution kind does not match a {0:?} instance")]
    KindMismatch(ProblemKind),
}

/// A single feasibility violation. Violations are data, not errors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Violation {
    DuplicateNode { node: usize },
    MissingNode { node: usize },
    NodeOutOfRange { node: usize },
    DepotInRoute { route: usize },
    CapacityExceeded { route: usize, load: u64, capacity: u32 },
    KindMismatch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tour {
    pub(crate) order: Vec<usize>,
    pub(crate) pos: Vec<usize>,
    pub(crate) cost: f64,
    pub(crate) generation: u64,
}

impl Tour {
    /// Checked constructor; computes the cost.
    pub fn new(inst: &RoutingInstance, order: Vec<usize>) -> Result<Self, SolutionError> {
        if inst.kind() != ProblemKind::Tsp {
            return Err(SolutionError::KindMismatch(inst.kind()));
        }
        let violations = permutation_violations(&order, inst.len());
        if !violations.is_empty() {
            return Err(SolutionError::Validation(violations));
        }
        Ok(Self::from_order_unchecked(inst, order))
    }

    /// Builds a tour without validating `order`. Only used to seed faults.
    pub fn from_order_unchecked(inst: &RoutingInstance, order: Vec<usize>) -> Self {
        let mut pos = vec![usize::MAX; inst.len()];
        for (p, &v) in order.iter().enumerate() {
            if let Some(slot) = pos.get_mut(v) {
                *slot = p;
            }
        }
        let cost = cyclic_length(inst, &order);
        Tour { order, pos, cost, generation: 0 }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn position(&self, node: usize) -> usize {
        self.pos[node]
    }

    #[inline]
    pub fn succ(&self, node: usize) -> usize {
        let p = self.pos[node] + 1;
        self.order[if p == self.order.len() { 0 } else { p }]
    }

    #[inline]
    pub fn pred(&self, node: usize) -> usize {
        let p = self.pos[node];
        self.order[if p == 0 { self.order.len() - 1 } else { p - 1 }]
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteSet {
    pub(crate) routes: Vec<Vec<usize>>,
    pub(crate) loads: Vec<u64>,
    /// node -> (route, position); [`NOWHERE`] for the depot.
    pub(crate) locate: Vec<(usize, usize)>,
    pub(crate) cost: f64,
    pub(crate) generation: u64,
}

impl RouteSet {
    /// Checked constructor. Empty routes are dropped.
    pub fn new(inst: &RoutingInstance, routes: Vec<Vec<usize>>) -> Result<Self, SolutionError> {
        if inst.kind() != ProblemKind::Cvrp {
            return Err(SolutionError::KindMismatch(inst.kind()));
        }
        let rs = Self::from_routes_unchecked(inst, routes);
        let violations = route_violations(inst, &rs.routes);
        if !violations.is_empty() {
            return Err(SolutionError::Validation(violations));
        }
        Ok(rs)
    }

    /// Builds a route set without validation (empty routes still dropped).
    pub fn from_routes_unchecked(inst: &RoutingInstance, mut routes: Vec<Vec<usize>>) -> Self {
        routes.retain(|r| !r.is_empty());
        let mut rs = RouteSet {
            loads: Vec::new(),
            locate: vec![NOWHERE; inst.len()],
            cost: 0.0,
            routes,
            generation: 0,
        };
        rs.rebuild_index(inst);
        rs.cost = rs.routes.iter().map(|r| route_length(inst, r)).sum();
        rs
    }

    pub(crate) fn rebuild_index(&mut self, inst: &RoutingInstance) {
        self.locate.iter_mut().for_each(|l| *l = NOWHERE);
        self.loads = self
            .routes
            .iter()
            .map(|r| r.iter().map(|&v| u64::from(inst.demand(v))).sum())
            .collect();
        for (ri, r) in self.routes.iter().enumerate() {
            for (p, &v) in r.iter().enumerate() {
                if let Some(slot) = self.locate.get_mut(v) {
                    *slot = (ri, p);
                }
            }
        }
    }

    pub(crate) fn reindex_route(&mut self, r: usize) {
        for (p, &v) in self.routes[r].iter().enumerate() {
            self.locate[v] = (r, p);
        }
    }

    pub fn routes(&self) -> &[Vec<usize>] {
        &self.routes
    }

    pub fn loads(&self) -> &[u64] {
        &self.loads
    }

    pub fn num_routes(&self) -> usize {
        self.routes.len()
    }

    /// `(route, position)` of a customer.
    pub fn locate(&self, node: usize) -> Option<(usize, usize)> {
        self.locate.get(node).copied().filter(|&l| l != NOWHERE)
    }

    /// Predecessor in the route, the depot for the first customer.
    #[inline]
    pub fn pred(&self, node: usize) -> usize {
        let (r, p) = self.locate[node];
        if p == 0 {
            0
        } else {
            self.routes[r][p - 1]
        }
    }

    /// Successor in the route, the depot for the last customer.
    #[inline]
    pub fn succ(&self, node: usize) -> usize {
        let (r, p) = self.locate[node];
        self.routes[r].get(p + 1).copied().unwrap_or(0)
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    /// Remaining capacity of the route holding customer `node`.
    pub fn free_capacity(&self, inst: &RoutingInstance, node: usize) -> Result<i64, SolutionError> {
        let (r, _) = self.locate(node).ok_or(SolutionError::Lookup(node))?;
        Ok(i64::from(inst.capacity()) - self.loads[r] as i64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Tour(Tour),
    Routes(RouteSet),
}

impl Solution {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Solution::Tour(_) => ProblemKind::Tsp,
            Solution::Routes(_) => ProblemKind::Cvrp,
        }
    }

    /// Cached true cost `L`.
    pub fn cost(&self) -> f64 {
        match self {
            Solution::Tour(t) => t.cost,
            Solution::Routes(r) => r.cost,
        }
    }

    pub fn generation(&self) -> u64 {
        match self {
            Solution::Tour(t) => t.generation,
            Solution::Routes(r) => r.generation,
        }
    }

    pub(crate) fn bump_generation(&mut self) {
        match self {
            Solution::Tour(t) => t.generation += 1,
            Solution::Routes(r) => r.generation += 1,
        }
    }

    pub fn as_tour(&self) -> Option<&Tour> {
        match self {
            Solution::Tour(t) => Some(t),
            Solution::Routes(_) => None,
        }
    }

    pub fn as_routes(&self) -> Option<&RouteSet> {
        match self {
            Solution::Routes(r) => Some(r),
            Solution::Tour(_) => None,
        }
    }

    /// Predecessor and successor of `node` in the current orientation. For
    /// CVRP customers the depot stands in at route ends.
    pub fn neighbours(&self, node: usize) -> (usize, usize) {
        match self {
            Solution::Tour(t) => (t.pred(node), t.succ(node)),
            Solution::Routes(r) => (r.pred(node), r.succ(node)),
        }
    }

    /// Every traversed edge, one entry per traversal. A CVRP route
    /// `[a, b]` yields `(0,a), (a,b), (b,0)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        match self {
            Solution::Tour(t) => {
                let n = t.order.len();
                (0..n).map(|p| (t.order[p], t.order[(p + 1) % n])).collect()
            }
            Solution::Routes(rs) => {
                let mut out = Vec::new();
                for r in &rs.routes {
                    let mut prev = 0;
                    for &v in r {
                        out.push((prev, v));
                        prev = v;
                    }
                    out.push((prev, 0));
                }
                out
            }
        }
    }

    /// Full recomputation of `L` from the instance.
    pub fn recompute_cost(&self, inst: &RoutingInstance) -> f64 {
        match self {
            Solution::Tour(t) => cyclic_length(inst, &t.order),
            Solution::Routes(r) => r.routes.iter().map(|route| route_length(inst, route)).sum(),
        }
    }

    /// Cost in the raw units of the instance: integer `nint` sums for
    /// rounded instances, `scale * L` otherwise.
    pub fn raw_cost(&self, inst: &RoutingInstance) -> f64 {
        self.edges().iter().map(|&(a, b)| inst.raw_edge_length(a, b)).sum()
    }

    pub fn to_file(&self, inst: &RoutingInstance) -> SolutionFile {
        let cost = self.raw_cost(inst);
        match self {
            Solution::Tour(t) => SolutionFile { cost, tour: Some(t.order.clone()), routes: None },
            Solution::Routes(r) => SolutionFile { cost, tour: None, routes: Some(r.routes.clone()) },
        }
    }

    pub fn from_file(inst: &RoutingInstance, file: &SolutionFile) -> Result<Self, SolutionError> {
        match (&file.tour, &file.routes, inst.kind()) {
            (Some(t), None, ProblemKind::Tsp) => Ok(Solution::Tour(Tour::new(inst, t.clone())?)),
            (None, Some(r), ProblemKind::Cvrp) => Ok(Solution::Routes(RouteSet::new(inst, r.clone())?)),
            _ => Err(SolutionError::KindMismatch(inst.kind())),
        }
    }
}

/// Result-file form: `{cost, tour}` or `{cost, routes}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub cost: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tour: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub routes: Option<Vec<Vec<usize>>>,
}

fn cyclic_length(inst: &RoutingInstance, order: &[usize]) -> f64 {
    let n = order.len();
    let in_range = |v: usize| v < inst.len();
    (0..n)
        .map(|p| (order[p], order[(p + 1) % n]))
        .filter(|&(a, b)| in_range(a) && in_range(b))
        .map(|(a, b)| inst.dist(a, b))
        .sum()
}

fn route_length(inst: &RoutingInstance, route: &[usize]) -> f64 {
    if route.is_empty() {
        return 0.0;
    }
    let mut prev = 0;
    let mut total = 0.0;
    for &v in route.iter().filter(|&&v| v < inst.len()) {
        total += inst.dist(prev, v);
        prev = v;
    }
    total + inst.dist(prev, 0)
}

fn permutation_violations(order: &[usize], n: usize) -> Vec<Violation> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for &v in order {
        if v >= n {
            out.push(Violation::NodeOutOfRange { node: v });
        } else if std::mem::replace(&mut seen[v], true) {
            out.push(Violation::DuplicateNode { node: v });
        }
    }
    out.extend(seen.iter().enumerate().filter(|(_, s)| !**s).map(|(v, _)| Violation::MissingNode { node: v }));
    out
}

fn route_violations(inst: &RoutingInstance, routes: &[Vec<usize>]) -> Vec<Violation> {
    let n = inst.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for (ri, r) in routes.iter().enumerate() {
        let mut load = 0u64;
        for &v in r {
            if v == 0 {
                out.push(Violation::DepotInRoute { route: ri });
            } else if v >= n {
                out.push(Violation::NodeOutOfRange { node: v });
            } else {
                load += u64::from(inst.demand(v));
                if std::mem::replace(&mut seen[v], true) {
                    out.push(Violation::DuplicateNode { node: v });
                }
            }
        }
        if load > u64::from(inst.capacity()) {
            out.push(Violation::CapacityExceeded { route: ri, load, capacity: inst.capacity() });
        }
    }
    out.extend((1..n).filter(|&v| !seen[v]).map(|v| Violation::MissingNode { node: v }));
    out
}

/// Length of a valid tour.
pub fn tsp_cost(inst: &RoutingInstance, tour: &Tour) -> Result<f64, SolutionError> {
    let violations = permutation_violations(&tour.order, inst.len());
    if !violations.is_empty() {
        return Err(SolutionError::Validation(violations));
    }
    Ok(cyclic_length(inst, &tour.order))
}

/// Total depot-to-depot length of a feasible route set.
pub fn cvrp_cost(inst: &RoutingInstance, rs: &RouteSet) -> Result<f64, SolutionError> {
    let violations = route_violations(inst, &rs.routes);
    if !violations.is_empty() {
        return Err(SolutionError::Validation(violations));
    }
    Ok(rs.routes.iter().map(|r| route_length(inst, r)).sum())
}

/// Lists every violated constraint; empty means feasible.
pub fn validate(inst: &RoutingInstance, sol: &Solution) -> Vec<Violation> {
    match (sol, inst.kind()) {
        (Solution::Tour(t), ProblemKind::Tsp) => permutation_violations(&t.order, inst.len()),
        (Solution::Routes(r), ProblemKind::Cvrp) => route_violations(inst, &r.routes),
        _ => vec![Violation::KindMismatch],
    }
}

/// Random permutation (TSP) or random customer order split greedily on
/// capacity (CVRP).
pub fn initial_solution(inst: &RoutingInstance, seed: u64) -> Solution {
    let mut rng = rng_from_seed(seed);
    match inst.kind() {
        ProblemKind::Tsp => {
            let mut order: Vec<usize> = (0..inst.len()).collect();
            order.shuffle(&mut rng);
            Solution::Tour(Tour::from_order_unchecked(inst, order))
        }
        ProblemKind::Cvrp => {
            let mut customers: Vec<usize> = inst.movable_nodes().collect();
            customers.shuffle(&mut rng);
            let cap = u64::from(inst.capacity());
            let mut routes: Vec<Vec<usize>> = Vec::new();
            let mut load = 0u64;
            for v in customers {
                let g = u64::from(inst.demand(v));
                match routes.last_mut() {
                    Some(r) if load + g <= cap => {
                        r.push(v);
                        load += g;
                    }
                    _ => {
                        routes.push(vec![v]);
                        load = g;
                    }
                }
            }
            Solution::Routes(RouteSet::from_routes_unchecked(inst, routes))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_cvrp, generate_uniform_tsp, DistanceMode, GenSpec};

    fn square() -> RoutingInstance {
        RoutingInstance::tsp(
            "sq",
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            DistanceMode::EuclidReal,
        )
        .unwrap()
    }

    #[test]
    fn square_tour_cost() {
        let inst = square();
        let t = Tour::new(&inst, vec![0, 1, 2, 3]).unwrap();
        assert_eq!(tsp_cost(&inst, &t).unwrap(), 4.0);
        assert_eq!(t.cost(), 4.0);
        let rotated = Tour::new(&inst, vec![2, 3, 0, 1]).unwrap();
        assert_eq!(rotated.cost(), 4.0);
        assert_eq!(t.succ(3), 0);
        assert_eq!(t.pred(0), 3);
    }

    #[test]
    fn invalid_permutation_rejected() {
        let inst = square();
        assert!(matches!(Tour::new(&inst, vec![0, 1, 1, 3]), Err(SolutionError::Validation(_))));
        let bad = Tour::from_order_unchecked(&inst, vec![0, 1, 1, 3]);
        assert!(tsp_cost(&inst, &bad).is_err());
        let v = validate(&inst, &Solution::Tour(bad));
        assert!(v.contains(&Violation::DuplicateNode { node: 1 }));
        assert!(v.contains(&Violation::MissingNode { node: 2 }));
    }

    fn line_cvrp() -> RoutingInstance {
        RoutingInstance::cvrp(
            "c",
            vec![[0.5, 0.5], [0.5, 1.0], [0.5, 0.0], [1.0, 0.5]],
            vec![0, 9, 8, 3],
            20,
            DistanceMode::EuclidReal,
        )
        .unwrap()
    }

    #[test]
    fn out_and_back() {
        let inst = line_cvrp();
        let rs = RouteSet::new(&inst, vec![vec![1], vec![], vec![2, 3]]).unwrap();
        assert_eq!(rs.num_routes(), 2);
        let single = RouteSet::new(&inst, vec![vec![1], vec![2], vec![3]]).unwrap();
        assert!((cvrp_cost(&inst, &single).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(route_length(&inst, &[1]), 1.0);
        assert_eq!(rs.free_capacity(&inst, 1).unwrap(), 11);
        assert_eq!(rs.free_capacity(&inst, 3).unwrap(), 9);
        assert!(matches!(rs.free_capacity(&inst, 0), Err(SolutionError::Lookup(0))));
    }

    #[test]
    fn seeded_faults() {
        let inst = line_cvrp();
        let dup = RouteSet::from_routes_unchecked(&inst, vec![vec![1, 2], vec![3, 2]]);
        let v = validate(&inst, &Solution::Routes(dup));
        assert_eq!(v, vec![Violation::DuplicateNode { node: 2 }]);
        let heavy = RouteSet::from_routes_unchecked(&inst, vec![vec![1, 2, 3]]);
        // load 20 on capacity 20 is still feasible
        assert!(validate(&inst, &Solution::Routes(heavy)).is_empty());
        let over = RoutingInstance::cvrp("o", inst.coords().to_vec(), vec![0, 9, 9, 3], 20, DistanceMode::EuclidReal).unwrap();
        let rs = RouteSet::from_routes_unchecked(&over, vec![vec![1, 2, 3]]);
        assert_eq!(
            validate(&over, &Solution::Routes(rs)),
            vec![Violation::CapacityExceeded { route: 0, load: 21, capacity: 20 }]
        );
        let depot = RouteSet::from_routes_unchecked(&inst, vec![vec![1, 0, 2], vec![3]]);
        assert_eq!(validate(&inst, &Solution::Routes(depot)), vec![Violation::DepotInRoute { route: 0 }]);
    }

    #[test]
    fn initial_solutions_are_feasible_and_deterministic() {
        let tsp = generate_uniform_tsp(30, 1).unwrap();
        let a = initial_solution(&tsp, 9);
        assert!(validate(&tsp, &a).is_empty());
        assert_eq!(a, initial_solution(&tsp, 9));
        let cvrp = generate_cvrp(&GenSpec::uniform(40, 2)).unwrap();
        let b = initial_solution(&cvrp, 9);
        assert!(validate(&cvrp, &b).is_empty());
        assert!((b.cost() - b.recompute_cost(&cvrp)).abs() < 1e-12);
    }

    #[test]
    fn full_demand_forces_singletons() {
        let inst = RoutingInstance::cvrp(
            "full",
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
            vec![0, 5, 5, 5],
            5,
            DistanceMode::EuclidReal,
        )
        .unwrap();
        let sol = initial_solution(&inst, 3);
        let rs = sol.as_routes().unwrap();
        assert_eq!(rs.num_routes(), 3);
        assert!(rs.routes().iter().all(|r| r.len() == 1));
    }

    #[test]
    fn edges_count_depot_legs() {
        let inst = line_cvrp();
        let rs = RouteSet::new(&inst, vec![vec![1], vec![2, 3]]).unwrap();
        let sol = Solution::Routes(rs);
        assert_eq!(sol.edges(), vec![(0, 1), (1, 0), (0, 2), (2, 3), (3, 0)]);
        assert_eq!(sol.edges().len(), 3 + 2);
    }

    #[test]
    fn solution_file_round_trip() {
        let inst = line_cvrp();
        let sol = Solution::Routes(RouteSet::new(&inst, vec![vec![1], vec![2, 3]]).unwrap());
        let file = sol.to_file(&inst);
        let json = serde_json::to_string(&file).unwrap();
        assert!(json.contains("\"routes\""));
        let back: SolutionFile = serde_json::from_str(&json).unwrap();
        assert_eq!(Solution::from_file(&inst, &back).unwrap(), sol);
    }
}
