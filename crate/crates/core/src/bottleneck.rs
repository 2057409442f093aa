//! Bottleneck-assignment lower bound on the optimal makespan.
//!
//! The bound is the smallest `T` such that agents can be assigned to goals
//! with every assigned shortest-path distance at most `T`. We binary-search
//! over the distinct realized distances and test each threshold with a
//! bipartite maximum matching.

use thiserror::Error;

use crate::graph::{bfs_distances, Graph, Vertex, INFINITY};
use crate::instance::Instance;

#[derive(Debug, Error)]
pub enum BottleneckError {
    #[error("no assignment covers all goals even at the maximal threshold")]
    NoPerfectMatching,
}

/// Shortest-path lengths `dist[i][j]` from start `i` to goal `j`.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    dist: Vec<Vec<u32>>,
}

impl DistanceMatrix {
    /// Fill the matrix with `k` BFS runs rooted at the goals.
    pub fn build(graph: &Graph, starts: &[Vertex], goals: &[Vertex]) -> Self {
        let mut dist = vec![vec![INFINITY; goals.len()]; starts.len()];
        for (j, &g) in goals.iter().enumerate() {
            let from_goal = bfs_distances(graph, g);
            for (i, &s) in starts.iter().enumerate() {
                dist[i][j] = from_goal[s as usize];
            }
        }
        DistanceMatrix { dist }
    }

    pub fn get(&self, start: usize, goal: usize) -> u32 {
        self.dist[start][goal]
    }

    pub fn rows(&self) -> usize {
        self.dist.len()
    }
}

/// Maximum bipartite matching by augmenting paths (Kuhn's algorithm) on the
/// edge set `{(i, j) : dist[i][j] <= threshold}`.
///
/// O(k * E) per call with E <= k^2; fine for benchmark-scale k (<= ~1000),
/// especially since the binary search only issues O(log k^2) calls.
fn has_perfect_matching(matrix: &DistanceMatrix, threshold: u32) -> bool {
    let k = matrix.rows();
    let mut match_of_goal: Vec<Option<usize>> = vec![None; k];
    let mut visited = vec![usize::MAX; k];

    fn augment(
        matrix: &DistanceMatrix,
        threshold: u32,
        i: usize,
        stamp: usize,
        visited: &mut [usize],
        match_of_goal: &mut [Option<usize>],
    ) -> bool {
        for j in 0..match_of_goal.len() {
            if matrix.get(i, j) <= threshold && visited[j] != stamp {
                visited[j] = stamp;
                let free = match match_of_goal[j] {
                    None => true,
                    Some(owner) => {
                        augment(matrix, threshold, owner, stamp, visited, match_of_goal)
                    }
                };
                if free {
                    match_of_goal[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }

    for i in 0..k {
        if !augment(matrix, threshold, i, i, &mut visited, &mut match_of_goal) {
            return false;
        }
    }
    true
}

/// Minimum over perfect assignments of the maximum assigned distance.
///
/// Sound lower bound on the optimal makespan: any solution induces an
/// assignment, and no agent can beat its shortest path.
pub fn bottleneck_lower_bound(
    graph: &Graph,
    starts: &[Vertex],
    goals: &[Vertex],
) -> Result<u32, BottleneckError> {
    assert_eq!(starts.len(), goals.len());
    let matrix = DistanceMatrix::build(graph, starts, goals);

    let mut thresholds: Vec<u32> = matrix
        .dist
        .iter()
        .flatten()
        .copied()
        .filter(|&d| d != INFINITY)
        .collect();
    thresholds.sort_unstable();
    thresholds.dedup();

    if thresholds.is_empty() || !has_perfect_matching(&matrix, *thresholds.last().unwrap()) {
        return Err(BottleneckError::NoPerfectMatching);
    }

    // Matching feasibility is monotone in the threshold, so binary search
    // over the distinct realized distances finds the minimal feasible one.
    let (mut lo, mut hi) = (0usize, thresholds.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_perfect_matching(&matrix, thresholds[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(thresholds[lo])
}

/// Convenience wrapper over an [`Instance`].
pub fn instance_lower_bound(instance: &Instance) -> u32 {
    bottleneck_lower_bound(instance.graph(), instance.starts(), instance.goals())
        .expect("instance guarantees mutual reachability")
}
