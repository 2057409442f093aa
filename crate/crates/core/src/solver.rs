//! The augment-and-reverse loop per horizon and the outer makespan search.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::baseline::find_augmenting_path_bfs;
use crate::bottleneck::instance_lower_bound;
use crate::bulk::find_augmenting_path;
use crate::graph::Vertex;
use crate::instance::Instance;
use crate::plan::{
    makespan_of, paths_to_plans, resolve_edge_conflicts, validate, Plan, PlanError,
};
use crate::search::{SearchContext, SearchTimeout};
use crate::ten::{NetworkError, NetworkNode, Step, TENetwork};

/// Which augmenting-path search drives the flow computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Bulk,
    Baseline,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Bulk => "bulk",
            Engine::Baseline => "baseline",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub engine: Engine,
    /// Wall-clock budget for the whole solve, estimator excluded.
    pub timeout: Option<Duration>,
    /// Probe exactly this horizon instead of searching for the minimum.
    pub t_override: Option<u32>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            engine: Engine::Bulk,
            timeout: Some(Duration::from_secs(30)),
            t_override: None,
        }
    }
}

/// Counters for one horizon probe.
#[derive(Debug, Clone)]
pub struct ProbeStats {
    pub t: u32,
    pub flow: u32,
    pub expansions: u64,
    pub generated: u64,
    pub sequences_created: u64,
    pub wall: Duration,
}

/// Search counters for a whole solve. Estimator time is kept apart from
/// `total_time` so runtime comparisons exclude it.
#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    pub expansions: u64,
    pub generated: u64,
    pub sequences_created: u64,
    pub augmentations: u64,
    pub per_t: Vec<ProbeStats>,
    pub lower_bound: u32,
    pub estimator_time: Duration,
    pub total_time: Duration,
}

/// A complete conflict-free solution.
#[derive(Debug, Clone)]
pub struct Solution {
    pub plans: Vec<Plan>,
    pub makespan: u32,
    /// Goal vertex each agent ends on.
    pub assignment: Vec<Vertex>,
    pub stats: SolveStats,
}

/// Result of a solve: either a solution, or (only under a horizon
/// override) the flow value the fixed horizon admits.
#[derive(Debug)]
pub enum SolveOutcome {
    Solved(Solution),
    Infeasible { t: u32, flow: u32, stats: SolveStats },
}

impl SolveOutcome {
    pub fn stats(&self) -> &SolveStats {
        match self {
            SolveOutcome::Solved(s) => &s.stats,
            SolveOutcome::Infeasible { stats, .. } => stats,
        }
    }

    pub fn into_solution(self) -> Option<Solution> {
        match self {
            SolveOutcome::Solved(s) => Some(s),
            SolveOutcome::Infeasible { .. } => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("timeout after {elapsed:?}")]
    Timeout { elapsed: Duration },

    #[error("no solution up to the horizon cap {cap} (k + |V| - 2)")]
    HorizonCapExceeded { cap: u32 },

    #[error(transparent)]
    Network(#[from] NetworkError),

    #[error(transparent)]
    Plan(#[from] PlanError),
}

/// A failed solve, with whatever counters had accumulated.
#[derive(Debug)]
pub struct SolveFailure {
    pub error: SolveError,
    pub stats: SolveStats,
}

impl std::fmt::Display for SolveFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.error.fmt(f)
    }
}

impl std::error::Error for SolveFailure {}

/// Maximum flow found on one network.
#[derive(Debug)]
pub struct MaxFlowResult {
    pub flow: u32,
    /// Present iff the flow saturates all agents.
    pub paths: Option<Vec<Vec<NetworkNode>>>,
}

/// Theoretical ceiling on connected-sequences created per solve:
/// `k |V| + T k (k - 1) / 2`.
pub fn counting_bound(k: u32, vertex_count: usize, t: u32) -> u64 {
    let (k, t) = (k as u64, t as u64);
    k * vertex_count as u64 + t * k * k.saturating_sub(1) / 2
}

fn find_path(
    engine: Engine,
    net: &TENetwork,
    ctx: &mut SearchContext,
) -> Result<Option<Vec<Step>>, SearchTimeout> {
    match engine {
        Engine::Bulk => find_augmenting_path(net, ctx),
        Engine::Baseline => find_augmenting_path_bfs(net, ctx),
    }
}

/// Alternate path search and reversal until the flow saturates all agents
/// or no augmenting path remains. Counters accumulate into `stats` even on
/// timeout.
pub fn max_flow(
    net: &mut TENetwork,
    engine: Engine,
    deadline: Option<Instant>,
    stats: &mut SolveStats,
) -> Result<MaxFlowResult, SolveError> {
    let k = net.starts().len() as u32;
    while net.flow_value() < k {
        let mut ctx = SearchContext::new(deadline);
        let found = find_path(engine, net, &mut ctx);
        stats.expansions += ctx.expansions;
        stats.generated += ctx.generated;
        match found {
            Err(SearchTimeout) => {
                return Err(SolveError::Timeout {
                    elapsed: Duration::default(),
                })
            }
            Ok(None) => break,
            Ok(Some(path)) => {
                net.reverse_path(&path)?;
                stats.augmentations += 1;
            }
        }
    }
    let flow = net.flow_value();
    let paths = if flow == k {
        Some(net.extract_flow_paths()?)
    } else {
        None
    };
    Ok(MaxFlowResult { flow, paths })
}

/// Solve an instance to optimality (or probe a fixed horizon).
///
/// The horizon starts at the bottleneck lower bound and grows by one until
/// the flow saturates all agents; each probe rebuilds the network from
/// scratch. A zero makespan (starts already covering the goals) is detected
/// before any network is built.
pub fn solve(instance: &Instance, options: &SolveOptions) -> Result<SolveOutcome, SolveFailure> {
    let solve_start = Instant::now();
    let mut stats = SolveStats::default();

    let estimator_start = Instant::now();
    let lb = instance_lower_bound(instance);
    stats.estimator_time = estimator_start.elapsed();
    stats.lower_bound = lb;

    let run_start = Instant::now();
    let deadline = options.timeout.map(|t| run_start + t);
    let fail = |mut stats: SolveStats, error: SolveError, started: Instant| {
        stats.total_time = started.elapsed();
        let error = match error {
            SolveError::Timeout { .. } => SolveError::Timeout {
                elapsed: started.elapsed(),
            },
            other => other,
        };
        SolveFailure { error, stats }
    };

    let k = instance.agent_count() as u32;
    let graph = instance.graph();

    if options.t_override.is_none() && lb == 0 {
        // Every start already sits on a distinct goal.
        let plans: Vec<Plan> = instance
            .starts()
            .iter()
            .map(|&start| Plan {
                start,
                actions: Vec::new(),
            })
            .collect();
        let assignment = instance.starts().to_vec();
        stats.total_time = solve_start.elapsed() - stats.estimator_time;
        return Ok(SolveOutcome::Solved(Solution {
            plans,
            makespan: 0,
            assignment,
            stats,
        }));
    }

    let cap = (k + graph.vertex_count() as u32).saturating_sub(2).max(1);
    let (first_t, last_t) = match options.t_override {
        Some(t) => (t, t),
        None => (lb.max(1), cap),
    };

    let mut prev_flow = 0u32;
    for t in first_t..=last_t {
        let probe_start = Instant::now();
        let seqs_before = stats.sequences_created;
        let exps_before = stats.expansions;
        let gens_before = stats.generated;

        let mut net = match TENetwork::new(graph, instance.starts(), instance.goals(), t) {
            Ok(net) => net,
            Err(e) => return Err(fail(stats, e.into(), run_start)),
        };
        let result = max_flow(&mut net, options.engine, deadline, &mut stats);
        stats.sequences_created += net.sequences_created();

        let result = match result {
            Ok(r) => r,
            Err(e) => return Err(fail(stats, e, run_start)),
        };

        debug_assert!(result.flow >= prev_flow, "flow regressed when T grew");
        prev_flow = result.flow;

        stats.per_t.push(ProbeStats {
            t,
            flow: result.flow,
            expansions: stats.expansions - exps_before,
            generated: stats.generated - gens_before,
            sequences_created: stats.sequences_created - seqs_before,
            wall: probe_start.elapsed(),
        });

        // The theoretical ceiling assumes the horizon is not padded; an
        // arbitrary override can force paths to reverse ~2T vertical edges
        // each, so only optimality-seeking solves are checked.
        debug_assert!(
            options.t_override.is_some()
                || stats.sequences_created <= counting_bound(k, graph.vertex_count(), t),
            "connected-sequence bound violated at T={t}"
        );

        if let Some(paths) = result.paths {
            let build = || -> Result<(Vec<Plan>, u32), SolveError> {
                let plans = paths_to_plans(&paths)?;
                let plans = resolve_edge_conflicts(&plans);
                let makespan = makespan_of(&plans, instance.goals())?;
                Ok((plans, makespan))
            };
            let (plans, makespan) = match build() {
                Ok(v) => v,
                Err(e) => return Err(fail(stats, e, run_start)),
            };
            debug_assert!(validate(instance, &plans, t).ok, "solver produced conflicts");
            debug_assert!(
                options.t_override.is_some() || makespan == t,
                "first feasible horizon {t} but plans realize {makespan}"
            );
            let assignment = plans.iter().map(Plan::final_position).collect();
            stats.total_time = run_start.elapsed();
            return Ok(SolveOutcome::Solved(Solution {
                plans,
                makespan,
                assignment,
                stats,
            }));
        }

        if options.t_override.is_some() {
            stats.total_time = run_start.elapsed();
            return Ok(SolveOutcome::Infeasible {
                t,
                flow: result.flow,
                stats,
            });
        }
    }

    Err(fail(
        stats,
        SolveError::HorizonCapExceeded { cap },
        run_start,
    ))
}
