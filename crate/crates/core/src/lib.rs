//! Learned operator selection with guided-local-search penalties for the
//! travelling salesman problem (TSP) and the capacitated vehicle routing
//! problem (CVRP).
//!
//! A search run starts from a random feasible solution and repeatedly asks a
//! policy network which local-search operator to apply next (2-opt, relocate,
//! swap, three-permutation). Operators pick their best move against an
//! augmented objective `h = L + lambda * sum(p_e)`, where `p_e` are per-edge
//! penalty counters. When the true cost `L` stalls for a fixed number of
//! steps, the highest-utility edges of the current solution are penalized,
//! which pushes the search out of the local minimum without any perturbation.
//!
//! Module map:
//!
//! - [`instance`]: problem instances, random generators, TSPLIB/CVRPLIB parsing.
//! - [`solution`]: tours, route sets, objective evaluation, feasibility checks.
//! - [`operators`]: candidate lists and the four operators with delta evaluation.
//! - [`gls`]: penalty state, augmented objective, utilities, penalty increments.
//! - [`policy`]: state features, the attention policy network, REINFORCE.
//! - [`search`]: the search loop, training, ablation variants.
//! - [`harness`]: exact reference solver, benchmarks, ablations, reports.
//!
//! Runnable walkthroughs of each capability live in the crate's `examples/`
//! directory (`cargo run --release --example solve_tsp`, ...).

pub mod error;
pub mod gls;
pub mod harness;
pub mod instance;
pub mod operators;
pub mod policy;
pub mod rng;
pub mod search;
pub mod solution;

pub use error::{Error, Result};
pub use gls::{Feature, PenaltyState};
pub use instance::{DistanceMode, GenSpec, ProblemKind, RoutingInstance};
pub use operators::{CandidateLists, EvalContext, Move, OperatorKind};
pub use policy::{Policy, PolicyConfig, StateFeatures};
pub use search::{SearchConfig, SearchResult, UpdateCadence, Variant};
pub use solution::{RouteSet, Solution, Tour, Violation};
