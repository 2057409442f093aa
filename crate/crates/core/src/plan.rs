//! Per-agent plans: conversion from flow paths, edge-conflict elimination
//! by plan swapping, and full-solution validation.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::instance::Instance;
use crate::ten::NetworkNode;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("flow path is malformed: expected a grid node at level {level}")]
    MalformedPath { level: u32 },

    #[error("agent {agent} never comes to rest on a goal vertex")]
    NeverRests { agent: usize },
}

/// One time-step action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Move(Vertex),
    Wait,
}

/// A start vertex plus one action per time step up to the horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub start: Vertex,
    pub actions: Vec<Action>,
}

impl Plan {
    /// Vertex occupied after each time step; index 0 is the start.
    pub fn positions(&self) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(self.actions.len() + 1);
        let mut cur = self.start;
        out.push(cur);
        for action in &self.actions {
            if let Action::Move(to) = action {
                cur = *to;
            }
            out.push(cur);
        }
        out
    }

    pub fn final_position(&self) -> Vertex {
        self.positions().pop().unwrap()
    }
}

/// A conflict found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub time: u32,
    pub agents: (usize, usize),
    /// Vertex for a vertex conflict; the two endpoints for an edge conflict.
    pub location: (Vertex, Option<Vertex>),
}

/// Outcome of validating a full solution.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub ok: bool,
    pub vertex_conflicts: Vec<Conflict>,
    pub edge_conflicts: Vec<Conflict>,
    pub goal_coverage: bool,
    pub first_failure: Option<String>,
}

/// Convert node-disjoint flow paths into plans, one action per time step.
/// Move edges become `Move`, wait edges become `Wait`, restriction edges
/// carry no action.
pub fn paths_to_plans(paths: &[Vec<NetworkNode>]) -> Result<Vec<Plan>, PlanError> {
    let mut plans = Vec::with_capacity(paths.len());
    for path in paths {
        let vertex_at = |idx: usize| -> Result<Vertex, PlanError> {
            match path.get(idx) {
                Some(NetworkNode::Grid { vertex, level }) if *level == idx as u32 => Ok(*vertex),
                _ => Err(PlanError::MalformedPath { level: idx as u32 }),
            }
        };
        let start = vertex_at(0)?;
        let mut actions = Vec::with_capacity((path.len() - 1) / 2);
        // Action edges leave even levels; restriction edges (odd levels)
        // are skipped.
        let mut level = 0;
        while level + 1 < path.len() {
            let here = vertex_at(level)?;
            let next = vertex_at(level + 1)?;
            if level % 2 == 0 {
                actions.push(if next == here {
                    Action::Wait
                } else {
                    Action::Move(next)
                });
            } else if next != here {
                return Err(PlanError::MalformedPath {
                    level: level as u32 + 1,
                });
            }
            level += 1;
        }
        plans.push(Plan { start, actions });
    }
    Ok(plans)
}

/// Remove edge conflicts by swapping: whenever two agents would traverse the
/// same edge in opposite directions, both wait that step and exchange their
/// remaining plans. Agents are anonymous, so the exchange preserves goal
/// coverage, and the occupied (vertex, time) multiset is unchanged.
pub fn resolve_edge_conflicts(plans: &[Plan]) -> Vec<Plan> {
    let mut plans: Vec<Plan> = plans.to_vec();
    let horizon = plans.iter().map(|p| p.actions.len()).max().unwrap_or(0);
    let mut pos: Vec<Vertex> = plans.iter().map(|p| p.start).collect();

    for t in 0..horizon {
        // Re-scan this step until no opposite-direction pair remains. Each
        // swap turns both movers into waiters, so this terminates.
        loop {
            let mut target: HashMap<(Vertex, Vertex), usize> = HashMap::new();
            let mut swap: Option<(usize, usize)> = None;
            for (i, plan) in plans.iter().enumerate() {
                if let Some(Action::Move(to)) = plan.actions.get(t).copied() {
                    if let Some(&j) = target.get(&(to, pos[i])) {
                        swap = Some((j, i));
                        break;
                    }
                    target.insert((pos[i], to), i);
                }
            }
            match swap {
                Some((a, b)) => {
                    plans[a].actions[t] = Action::Wait;
                    plans[b].actions[t] = Action::Wait;
                    let suffix_a = plans[a].actions.split_off(t + 1);
                    let suffix_b = plans[b].actions.split_off(t + 1);
                    plans[a].actions.extend(suffix_b);
                    plans[b].actions.extend(suffix_a);
                }
                None => break,
            }
        }
        for (i, plan) in plans.iter().enumerate() {
            if let Some(Action::Move(to)) = plan.actions.get(t) {
                pos[i] = *to;
            }
        }
    }
    plans
}

/// Check per-step legality, vertex conflicts, edge conflicts and goal
/// coverage at the final time step. Failures are reported, not thrown.
pub fn validate(instance: &Instance, plans: &[Plan], horizon: u32) -> ValidationReport {
    validate_against(instance.graph(), instance.goals(), plans, horizon)
}

/// [`validate`] against an explicit graph and goal set.
pub fn validate_against(
    graph: &Graph,
    goals: &[Vertex],
    plans: &[Plan],
    horizon: u32,
) -> ValidationReport {
    let mut report = ValidationReport {
        ok: false,
        goal_coverage: false,
        ..Default::default()
    };
    let fail = |report: &mut ValidationReport, msg: String| {
        if report.first_failure.is_none() {
            report.first_failure = Some(msg);
        }
    };

    for (i, plan) in plans.iter().enumerate() {
        if plan.actions.len() != horizon as usize {
            fail(
                &mut report,
                format!(
                    "agent {i} has {} actions, expected {horizon}",
                    plan.actions.len()
                ),
            );
            return report;
        }
        let mut cur = plan.start;
        for (t, action) in plan.actions.iter().enumerate() {
            if let Action::Move(to) = action {
                if !graph.neighbors(cur).contains(to) {
                    fail(
                        &mut report,
                        format!("agent {i} step {t}: illegal move {cur} -> {to}"),
                    );
                    return report;
                }
                cur = *to;
            }
        }
    }

    let positions: Vec<Vec<Vertex>> = plans.iter().map(Plan::positions).collect();
    for t in 0..=horizon as usize {
        let mut at: HashMap<Vertex, usize> = HashMap::new();
        for (i, pos) in positions.iter().enumerate() {
            if let Some(&j) = at.get(&pos[t]) {
                report.vertex_conflicts.push(Conflict {
                    time: t as u32,
                    agents: (j, i),
                    location: (pos[t], None),
                });
            }
            at.insert(pos[t], i);
        }
    }
    for t in 0..horizon as usize {
        let mut traversals: HashMap<(Vertex, Vertex), usize> = HashMap::new();
        for (i, pos) in positions.iter().enumerate() {
            if pos[t] == pos[t + 1] {
                continue;
            }
            if let Some(&j) = traversals.get(&(pos[t + 1], pos[t])) {
                report.edge_conflicts.push(Conflict {
                    time: t as u32,
                    agents: (j, i),
                    location: (pos[t], Some(pos[t + 1])),
                });
            }
            traversals.insert((pos[t], pos[t + 1]), i);
        }
    }

    let mut final_positions: Vec<Vertex> = positions.iter().map(|p| *p.last().unwrap()).collect();
    let mut goal_sorted: Vec<Vertex> = goals.to_vec();
    final_positions.sort_unstable();
    goal_sorted.sort_unstable();
    report.goal_coverage = final_positions == goal_sorted;

    let vertex_msg = report.vertex_conflicts.first().map(|c| {
        format!(
            "vertex conflict at t={} between agents {:?} at {}",
            c.time, c.agents, c.location.0
        )
    });
    let edge_msg = report.edge_conflicts.first().map(|c| {
        format!(
            "edge conflict at t={} between agents {:?} on {}-{}",
            c.time,
            c.agents,
            c.location.0,
            c.location.1.unwrap()
        )
    });
    if let Some(msg) = vertex_msg {
        fail(&mut report, msg);
    }
    if let Some(msg) = edge_msg {
        fail(&mut report, msg);
    }
    if !report.goal_coverage {
        fail(&mut report, "final positions do not cover the goals".into());
    }

    report.ok = report.vertex_conflicts.is_empty()
        && report.edge_conflicts.is_empty()
        && report.goal_coverage;
    report
}

/// Cost of the solution: the latest time any agent still acts. Trailing
/// waits at a goal are free, so this is the max over agents of the earliest
/// time after which the agent rests on a goal.
pub fn makespan_of(plans: &[Plan], goals: &[Vertex]) -> Result<u32, PlanError> {
    let mut makespan = 0u32;
    for (i, plan) in plans.iter().enumerate() {
        if !goals.contains(&plan.final_position()) {
            return Err(PlanError::NeverRests { agent: i });
        }
        let last_move = plan
            .actions
            .iter()
            .rposition(|a| matches!(a, Action::Move(_)))
            .map(|idx| idx as u32 + 1)
            .unwrap_or(0);
        makespan = makespan.max(last_move);
    }
    Ok(makespan)
}

/// Multiset of `(vertex, time)` cells a set of plans occupies.
pub fn occupancy(plans: &[Plan]) -> Vec<(Vertex, u32)> {
    let mut cells: Vec<(Vertex, u32)> = plans
        .iter()
        .flat_map(|p| {
            p.positions()
                .into_iter()
                .enumerate()
                .map(|(t, v)| (v, t as u32))
        })
        .collect();
    cells.sort_unstable();
    cells
}
