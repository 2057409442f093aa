//! Makespan-optimal anonymous multi-agent path finding.
//!
//! Agents are interchangeable: any agent may serve any goal, and every goal
//! must be reached. The solver reduces the problem to unit-capacity maximum
//! flow on an implicit time-expanded network and searches that network with
//! either of two engines:
//!
//! * [`baseline`]: plain node-by-node BFS over the residual network, the
//!   reference algorithm and correctness oracle;
//! * [`bulk`]: a search that compresses runs of same-vertex nodes into
//!   connected-sequences and expands them wholesale, visiting orders of
//!   magnitude fewer states on large networks.
//!
//! The outer loop grows the horizon from a bottleneck-assignment lower
//! bound until the flow saturates all agents; the flow paths convert
//! directly into conflict-free plans.

pub mod baseline;
pub mod bottleneck;
pub mod bulk;
pub mod graph;
pub mod instance;
pub mod movingai;
pub mod plan;
pub mod search;
pub mod solver;
pub mod synth;
pub mod ten;

pub use graph::{bfs_distances, grid_to_graph, Graph, Vertex, INFINITY};
pub use instance::{build_instance, Instance, InstanceError};
pub use movingai::{parse_map, parse_scenario, GridMap, MapError, ScenarioEntry, ScenarioError};
pub use plan::{makespan_of, resolve_edge_conflicts, validate, Action, Plan, ValidationReport};
pub use solver::{
    max_flow, solve, Engine, SolveError, SolveFailure, SolveOptions, SolveOutcome, SolveStats,
    Solution,
};
pub use ten::{ConnectedSequence, EdgeKind, NetworkNode, Step, TENetwork};
