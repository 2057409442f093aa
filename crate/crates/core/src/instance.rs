//! Problem instances: k distinct starts, k distinct goals, no pre-assignment.

use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{bfs_distances, grid_to_graph, Graph, Vertex, INFINITY};
use crate::movingai::{GridMap, ScenarioEntry};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("requested {requested} agents but scenario has only {available} entries")]
    NotEnoughEntries { requested: usize, available: usize },

    #[error("agent count must be positive")]
    ZeroAgents,

    #[error("entry {index}: start on blocked cell ({x}, {y})")]
    StartBlocked { index: usize, x: usize, y: usize },

    #[error("entry {index}: goal on blocked cell ({x}, {y})")]
    GoalBlocked { index: usize, x: usize, y: usize },

    #[error("duplicate start vertex across entries {first} and {second}")]
    DuplicateStart { first: usize, second: usize },

    #[error("duplicate goal vertex across entries {first} and {second}")]
    DuplicateGoal { first: usize, second: usize },

    #[error("start/goal set is not connected: vertex {vertex} unreachable from the first start")]
    Disconnected { vertex: Vertex },

    #[error("starts and goals must have equal length")]
    LengthMismatch,
}

/// An anonymous MAPF instance over a shared graph.
///
/// Starts are pairwise distinct, goals are pairwise distinct, and every
/// start can reach every goal.
#[derive(Debug, Clone)]
pub struct Instance {
    graph: Arc<Graph>,
    starts: Vec<Vertex>,
    goals: Vec<Vertex>,
}

impl Instance {
    /// Validate and wrap raw start/goal vertex lists.
    pub fn new(
        graph: Arc<Graph>,
        starts: Vec<Vertex>,
        goals: Vec<Vertex>,
    ) -> Result<Self, InstanceError> {
        if starts.len() != goals.len() {
            return Err(InstanceError::LengthMismatch);
        }
        if starts.is_empty() {
            return Err(InstanceError::ZeroAgents);
        }
        check_distinct(&starts, true)?;
        check_distinct(&goals, false)?;

        // One BFS from the first start covers the mutual-reachability
        // precondition: everything must sit in a single component.
        let dist = bfs_distances(&graph, starts[0]);
        for &v in starts.iter().chain(goals.iter()) {
            if dist[v as usize] == INFINITY {
                return Err(InstanceError::Disconnected { vertex: v });
            }
        }

        Ok(Instance {
            graph,
            starts,
            goals,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn graph_arc(&self) -> Arc<Graph> {
        Arc::clone(&self.graph)
    }

    pub fn starts(&self) -> &[Vertex] {
        &self.starts
    }

    pub fn goals(&self) -> &[Vertex] {
        &self.goals
    }

    pub fn agent_count(&self) -> usize {
        self.starts.len()
    }
}

fn check_distinct(vertices: &[Vertex], is_start: bool) -> Result<(), InstanceError> {
    let mut seen: std::collections::HashMap<Vertex, usize> = Default::default();
    for (i, &v) in vertices.iter().enumerate() {
        if let Some(&first) = seen.get(&v) {
            return Err(if is_start {
                InstanceError::DuplicateStart { first, second: i }
            } else {
                InstanceError::DuplicateGoal { first, second: i }
            });
        }
        seen.insert(v, i);
    }
    Ok(())
}

/// Build an instance from the first `k` scenario entries.
///
/// Follows the benchmark protocol of taking scenario prefixes: agent `i`
/// starts at entry `i`'s start cell and the goal set is the first `k` goal
/// cells.
pub fn build_instance(
    map: &GridMap,
    entries: &[ScenarioEntry],
    k: usize,
) -> Result<Instance, InstanceError> {
    if k == 0 {
        return Err(InstanceError::ZeroAgents);
    }
    if k > entries.len() {
        return Err(InstanceError::NotEnoughEntries {
            requested: k,
            available: entries.len(),
        });
    }

    let graph = Arc::new(grid_to_graph(map));
    let mut starts = Vec::with_capacity(k);
    let mut goals = Vec::with_capacity(k);
    let mut start_cells: HashSet<(usize, usize)> = HashSet::new();
    let mut goal_cells: HashSet<(usize, usize)> = HashSet::new();

    for (i, entry) in entries.iter().take(k).enumerate() {
        let (sx, sy) = entry.start;
        let (gx, gy) = entry.goal;
        let s = graph
            .vertex_at(sx, sy)
            .ok_or(InstanceError::StartBlocked { index: i, x: sx, y: sy })?;
        let g = graph
            .vertex_at(gx, gy)
            .ok_or(InstanceError::GoalBlocked { index: i, x: gx, y: gy })?;
        if !start_cells.insert(entry.start) {
            let first = entries[..i].iter().position(|e| e.start == entry.start);
            return Err(InstanceError::DuplicateStart {
                first: first.unwrap_or(0),
                second: i,
            });
        }
        if !goal_cells.insert(entry.goal) {
            let first = entries[..i].iter().position(|e| e.goal == entry.goal);
            return Err(InstanceError::DuplicateGoal {
                first: first.unwrap_or(0),
                second: i,
            });
        }
        starts.push(s);
        goals.push(g);
    }

    Instance::new(graph, starts, goals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::movingai::{parse_map, parse_scenario};

    fn open_map(w: usize, h: usize) -> GridMap {
        let rows = format!("{}\n", ".".repeat(w)).repeat(h);
        parse_map(&format!("type octile\nheight {h}\nwidth {w}\nmap\n{rows}")).unwrap()
    }

    #[test]
    fn single_agent_instance() {
        let map = open_map(8, 8);
        let entries = parse_scenario("0 m.map 8 8 0 0 7 7 14.0").unwrap();
        let inst = build_instance(&map, &entries, 1).unwrap();
        assert_eq!(inst.agent_count(), 1);
        assert_eq!(inst.graph().cell_of(inst.starts()[0]), (0, 0));
        assert_eq!(inst.graph().cell_of(inst.goals()[0]), (7, 7));
    }

    #[test]
    fn goal_on_blocked_cell() {
        let map = parse_map("type octile\nheight 1\nwidth 3\nmap\n..@\n").unwrap();
        let entries = parse_scenario("0 m.map 3 1 0 0 2 0 2.0").unwrap();
        match build_instance(&map, &entries, 1) {
            Err(InstanceError::GoalBlocked { x: 2, y: 0, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_start_rejected() {
        let map = open_map(4, 4);
        let entries =
            parse_scenario("0 m.map 4 4 0 0 3 3 6.0\n1 m.map 4 4 0 0 2 2 4.0").unwrap();
        match build_instance(&map, &entries, 2) {
            Err(InstanceError::DuplicateStart { first: 0, second: 1 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn k_too_large() {
        let map = open_map(4, 4);
        let entries = parse_scenario("0 m.map 4 4 0 0 3 3 6.0").unwrap();
        assert!(matches!(
            build_instance(&map, &entries, 2),
            Err(InstanceError::NotEnoughEntries { .. })
        ));
    }

    #[test]
    fn disconnected_rejected() {
        let map = parse_map("type octile\nheight 1\nwidth 3\nmap\n.@.\n").unwrap();
        let entries = parse_scenario("0 m.map 3 1 0 0 2 0 2.0").unwrap();
        assert!(matches!(
            build_instance(&map, &entries, 1),
            Err(InstanceError::Disconnected { .. })
        ));
    }
}
