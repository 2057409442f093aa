//! Node-by-node BFS over the residual network.
//!
//! This is the reference Ford-Fulkerson path finder: plain FIFO breadth-
//! first traversal visiting individual network nodes, used both as the
//! competitor in benchmarks and as the correctness oracle for the bulk
//! engine. It iterates the same implicit network, so the two engines differ
//! only in how many states they touch.

use std::collections::VecDeque;


use crate::search::{SearchContext, SearchTimeout};
use crate::ten::{EdgeKind, NetworkNode, Step, TENetwork};

/// Find any source-to-sink residual path by BFS, visiting each network node
/// at most once. Every dequeue counts as one expansion, so per round the
/// count is bounded by `(2T + 1) |V| + 2`.
pub fn find_augmenting_path_bfs(
    net: &TENetwork,
    ctx: &mut SearchContext,
) -> Result<Option<Vec<Step>>, SearchTimeout> {
    let nv = net.graph().vertex_count();
    let levels = net.top_level() as usize + 1;
    let total = nv * levels;
    let source_idx = total as u32;
    let sink_idx = total as u32 + 1;

    let index = |node: NetworkNode| -> u32 {
        match node {
            NetworkNode::Source => source_idx,
            NetworkNode::Sink => sink_idx,
            NetworkNode::Grid { vertex, level } => level * nv as u32 + vertex,
        }
    };
    let node_of = |idx: u32| -> NetworkNode {
        if idx == source_idx {
            NetworkNode::Source
        } else if idx == sink_idx {
            NetworkNode::Sink
        } else {
            NetworkNode::Grid {
                vertex: idx % nv as u32,
                level: idx / nv as u32,
            }
        }
    };

    let mut visited = vec![false; total + 2];
    let mut parent: Vec<(u32, EdgeKind)> = vec![(u32::MAX, EdgeKind::Source); total + 2];
    let mut queue: VecDeque<u32> = VecDeque::new();

    visited[source_idx as usize] = true;
    queue.push_back(source_idx);

    while let Some(cur) = queue.pop_front() {
        ctx.tick()?;
        if cur == sink_idx {
            return Ok(Some(reconstruct(&parent, node_of, sink_idx)));
        }
        let node = node_of(cur);
        net.for_each_residual_neighbor(node, |next, kind| {
            let idx = index(next);
            if !visited[idx as usize] {
                visited[idx as usize] = true;
                parent[idx as usize] = (cur, kind);
                ctx.generated += 1;
                queue.push_back(idx);
            }
        });
    }
    Ok(None)
}

fn reconstruct(
    parent: &[(u32, EdgeKind)],
    node_of: impl Fn(u32) -> NetworkNode,
    sink_idx: u32,
) -> Vec<Step> {
    let mut steps = Vec::new();
    let mut cur = sink_idx;
    while parent[cur as usize].0 != u32::MAX {
        let (prev, kind) = parent[cur as usize];
        steps.push(Step {
            from: node_of(prev),
            to: node_of(cur),
            kind,
        });
        cur = prev;
    }
    steps.reverse();
    steps
}

/// Grid nodes a failed search has seen; used to cross-check the bulk
/// engine's implicit coverage.
pub fn reachable_grid_nodes(net: &TENetwork) -> Vec<NetworkNode> {
    let mut seen = std::collections::HashSet::new();
    let mut queue = VecDeque::from([NetworkNode::Source]);
    seen.insert(NetworkNode::Source);
    let mut out = Vec::new();
    while let Some(node) = queue.pop_front() {
        net.for_each_residual_neighbor(node, |next, _| {
            if seen.insert(next) {
                if let NetworkNode::Grid { .. } = next {
                    out.push(next);
                }
                queue.push_back(next);
            }
        });
    }
    out
}
