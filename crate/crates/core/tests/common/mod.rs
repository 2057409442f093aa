//! Shared helpers and independent oracles for the integration tests.
//!
//! Everything here stays deliberately naive: the joint-state BFS and the
//! factorial assignment scan are the ground truth the solver is checked
//! against, so they avoid every data structure the solver itself uses.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use amapf_core::graph::{grid_to_graph, Graph, Vertex};
use amapf_core::instance::Instance;
use amapf_core::movingai::{parse_map, GridMap};
use amapf_core::ten::{NetworkNode, Step, TENetwork};

pub fn open_map(w: usize, h: usize) -> GridMap {
    let rows = format!("{}\n", ".".repeat(w)).repeat(h);
    parse_map(&format!("type octile\nheight {h}\nwidth {w}\nmap\n{rows}")).unwrap()
}

pub fn corridor_graph(n: usize) -> Graph {
    grid_to_graph(&open_map(n, 1))
}

/// The worked-example instance: corridor A..F, starts {C, F}, goals {A, D}.
pub fn corridor_example() -> Instance {
    Instance::new(Arc::new(corridor_graph(6)), vec![2, 5], vec![0, 3]).unwrap()
}

/// All instances with `k` agents on the given map (starts and goals as
/// unordered vertex subsets; agents are anonymous).
pub fn enumerate_instances(map: &GridMap, k: usize) -> Vec<Instance> {
    let graph = Arc::new(grid_to_graph(map));
    let n = graph.vertex_count();
    let subsets = subsets_of_size(n, k);
    let mut out = Vec::new();
    for starts in &subsets {
        for goals in &subsets {
            if let Ok(instance) =
                Instance::new(Arc::clone(&graph), starts.clone(), goals.clone())
            {
                out.push(instance);
            }
        }
    }
    out
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, k: usize, from: usize, cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in from..n {
            cur.push(v as Vertex);
            rec(n, k, v + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// Optimal makespan by breadth-first search over joint configurations.
///
/// A configuration is the set of occupied vertices; a transition assigns
/// each occupied vertex a target (itself or a neighbor) with all targets
/// distinct and no two agents exchanging an edge. Returns `None` if the
/// goal configuration is unreachable within `limit` steps.
pub fn joint_state_optimum(instance: &Instance, limit: u32) -> Option<u32> {
    let graph = instance.graph();
    let start: Vec<Vertex> = {
        let mut s = instance.starts().to_vec();
        s.sort_unstable();
        s
    };
    let goal: Vec<Vertex> = {
        let mut g = instance.goals().to_vec();
        g.sort_unstable();
        g
    };
    if start == goal {
        return Some(0);
    }

    let mut dist: HashMap<Vec<Vertex>, u32> = HashMap::from([(start.clone(), 0)]);
    let mut queue = VecDeque::from([start]);
    while let Some(state) = queue.pop_front() {
        let d = dist[&state];
        if d >= limit {
            continue;
        }
        let mut chosen: Vec<Vertex> = Vec::with_capacity(state.len());
        let mut next_states: Vec<Vec<Vertex>> = Vec::new();
        expand_moves(graph, &state, &mut chosen, &mut next_states);
        for mut next in next_states {
            next.sort_unstable();
            if !dist.contains_key(&next) {
                if next == goal {
                    return Some(d + 1);
                }
                dist.insert(next.clone(), d + 1);
                queue.push_back(next);
            }
        }
    }
    None
}

fn expand_moves(
    graph: &Graph,
    state: &[Vertex],
    chosen: &mut Vec<Vertex>,
    out: &mut Vec<Vec<Vertex>>,
) {
    let i = chosen.len();
    if i == state.len() {
        out.push(chosen.clone());
        return;
    }
    let mut options = vec![state[i]];
    options.extend_from_slice(graph.neighbors(state[i]));
    'option: for target in options {
        for (j, &prev) in chosen.iter().enumerate() {
            if prev == target {
                continue 'option; // vertex conflict
            }
            if prev == state[i] && state[j] == target {
                continue 'option; // edge exchange
            }
        }
        chosen.push(target);
        expand_moves(graph, state, chosen, out);
        chosen.pop();
    }
}

/// Minimum over all assignments of the maximum start-goal BFS distance,
/// by scanning every permutation.
pub fn brute_force_bottleneck(instance: &Instance) -> u32 {
    let graph = instance.graph();
    let per_start: Vec<Vec<u32>> = instance
        .starts()
        .iter()
        .map(|&s| plain_bfs(graph, s))
        .collect();
    let goals = instance.goals();
    let mut best = u32::MAX;
    permute(goals.len(), &mut |perm| {
        let worst = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| per_start[i][goals[j] as usize])
            .max()
            .unwrap();
        best = best.min(worst);
    });
    best
}

fn plain_bfs(graph: &Graph, from: Vertex) -> Vec<u32> {
    let mut dist = vec![u32::MAX; graph.vertex_count()];
    let mut queue = VecDeque::from([from]);
    dist[from as usize] = 0;
    while let Some(v) = queue.pop_front() {
        for &u in graph.neighbors(v) {
            if dist[u as usize] == u32::MAX {
                dist[u as usize] = dist[v as usize] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

fn permute(n: usize, f: &mut impl FnMut(&[usize])) {
    let mut items: Vec<usize> = (0..n).collect();
    fn rec(items: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == items.len() {
            f(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            rec(items, k + 1, f);
            items.swap(k, i);
        }
    }
    rec(&mut items, 0, f);
}

/// Check that a reconstructed path is a chain of currently traversable
/// residual edges from source to sink.
pub fn assert_residual_path(net: &TENetwork, path: &[Step]) {
    assert_eq!(path.first().map(|s| s.from), Some(NetworkNode::Source));
    assert_eq!(path.last().map(|s| s.to), Some(NetworkNode::Sink));
    for w in path.windows(2) {
        assert_eq!(w[0].to, w[1].from, "path not contiguous");
    }
    let mut seen = HashSet::new();
    for step in path {
        assert!(seen.insert(step.from), "path revisits {:?}", step.from);
        let neighbors = net.residual_neighbors(step.from);
        assert!(
            neighbors.contains(&(step.to, step.kind)),
            "step {step:?} is not a residual edge; options were {neighbors:?}"
        );
    }
}
