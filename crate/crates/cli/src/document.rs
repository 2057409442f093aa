//! The JSON solution document and its mapping to core plans.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use amapf_core::graph::Graph;
use amapf_core::plan::{Action, Plan};
use amapf_core::solver::{SolveStats, Solution};

#[derive(Debug, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub map: String,
    pub agents: Vec<AgentDoc>,
    pub makespan: u32,
    pub stats: StatsDoc,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AgentDoc {
    pub start: [usize; 2],
    pub goal: [usize; 2],
    /// One letter per time step: U, D, L, R or W.
    pub actions: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StatsDoc {
    pub lower_bound: u32,
    pub expansions: u64,
    pub generated: u64,
    pub augmentations: u64,
    pub sequences_created: u64,
    pub estimator_ms: f64,
    pub solve_ms: f64,
    pub t_probes: Vec<ProbeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProbeDoc {
    pub t: u32,
    pub flow: u32,
    pub expansions: u64,
    pub wall_ms: f64,
}

/// Report emitted when a fixed horizon cannot carry all agents.
#[derive(Debug, Serialize, Deserialize)]
pub struct InfeasibleDoc {
    pub map: String,
    pub status: String,
    pub t: u32,
    pub flow: u32,
    pub agents: usize,
    pub stats: StatsDoc,
}

pub fn stats_doc(stats: &SolveStats) -> StatsDoc {
    StatsDoc {
        lower_bound: stats.lower_bound,
        expansions: stats.expansions,
        generated: stats.generated,
        augmentations: stats.augmentations,
        sequences_created: stats.sequences_created,
        estimator_ms: stats.estimator_time.as_secs_f64() * 1e3,
        solve_ms: stats.total_time.as_secs_f64() * 1e3,
        t_probes: stats
            .per_t
            .iter()
            .map(|p| ProbeDoc {
                t: p.t,
                flow: p.flow,
                expansions: p.expansions,
                wall_ms: p.wall.as_secs_f64() * 1e3,
            })
            .collect(),
    }
}

fn direction(graph: &Graph, from: u32, to: u32) -> &'static str {
    let (fx, fy) = graph.cell_of(from);
    let (tx, ty) = graph.cell_of(to);
    match (tx as i64 - fx as i64, ty as i64 - fy as i64) {
        (0, -1) => "U",
        (0, 1) => "D",
        (-1, 0) => "L",
        (1, 0) => "R",
        _ => unreachable!("non-adjacent move in a validated plan"),
    }
}

pub fn solution_doc(map_name: &str, graph: &Graph, solution: &Solution) -> SolutionDoc {
    let agents = solution
        .plans
        .iter()
        .zip(&solution.assignment)
        .map(|(plan, &goal)| {
            let mut cur = plan.start;
            let actions = plan
                .actions
                .iter()
                .map(|action| match action {
                    Action::Wait => "W".to_string(),
                    Action::Move(to) => {
                        let letter = direction(graph, cur, *to);
                        cur = *to;
                        letter.to_string()
                    }
                })
                .collect();
            let (sx, sy) = graph.cell_of(plan.start);
            let (gx, gy) = graph.cell_of(goal);
            AgentDoc {
                start: [sx, sy],
                goal: [gx, gy],
                actions,
            }
        })
        .collect();
    SolutionDoc {
        map: map_name.to_string(),
        agents,
        makespan: solution.makespan,
        stats: stats_doc(&solution.stats),
    }
}

/// Rebuild a core plan from one agent's action letters.
pub fn plan_from_doc(graph: &Graph, agent: &AgentDoc, index: usize) -> Result<Plan> {
    let [sx, sy] = agent.start;
    let start = graph
        .vertex_at(sx, sy)
        .ok_or_else(|| anyhow!("agent {index}: start ({sx}, {sy}) is not a passable cell"))?;
    let (mut x, mut y) = (sx as i64, sy as i64);
    let mut actions = Vec::with_capacity(agent.actions.len());
    for (t, letter) in agent.actions.iter().enumerate() {
        let delta = match letter.as_str() {
            "U" => Some((0i64, -1i64)),
            "D" => Some((0, 1)),
            "L" => Some((-1, 0)),
            "R" => Some((1, 0)),
            "W" => None,
            other => bail!("agent {index}, step {t}: unknown action letter `{other}`"),
        };
        match delta {
            None => actions.push(Action::Wait),
            Some((dx, dy)) => {
                let (nx, ny) = (x + dx, y + dy);
                let vertex = (nx >= 0 && ny >= 0)
                    .then(|| graph.vertex_at(nx as usize, ny as usize))
                    .flatten()
                    .with_context(|| {
                        format!("agent {index}, step {t}: move {letter} leaves the map or hits a wall at ({nx}, {ny})")
                    })?;
                actions.push(Action::Move(vertex));
                (x, y) = (nx, ny);
            }
        }
    }
    Ok(Plan { start, actions })
}

pub fn render_plain(doc: &SolutionDoc) -> String {
    let mut out = String::new();
    out.push_str(&format!("map: {}\n", doc.map));
    out.push_str(&format!("makespan: {}\n", doc.makespan));
    out.push_str(&format!(
        "agents: {}  expansions: {}  augmentations: {}  estimator: {:.2} ms  solve: {:.2} ms\n",
        doc.agents.len(),
        doc.stats.expansions,
        doc.stats.augmentations,
        doc.stats.estimator_ms,
        doc.stats.solve_ms
    ));
    for (i, agent) in doc.agents.iter().enumerate() {
        out.push_str(&format!(
            "agent {i}: ({}, {}) -> ({}, {})  {}\n",
            agent.start[0],
            agent.start[1],
            agent.goal[0],
            agent.goal[1],
            agent.actions.join("")
        ));
    }
    out
}
