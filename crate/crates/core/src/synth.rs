//! Seeded generation of benchmark-style maps and instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{bfs_distances, grid_to_graph, Vertex, INFINITY};
use crate::instance::Instance;
use crate::movingai::GridMap;

/// A random map with roughly `obstacle_ratio` blocked cells, in the style
/// of the `random-*` benchmark maps. Deterministic for a given seed.
pub fn random_map(width: usize, height: usize, obstacle_ratio: f64, seed: u64) -> GridMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let passable = (0..width * height)
        .map(|_| !rng.gen_bool(obstacle_ratio))
        .collect();
    GridMap::from_passable(width, height, passable)
}

/// Draw `k` distinct starts and `k` distinct goals from the largest
/// connected component of the map. Deterministic for a given seed.
///
/// Panics if the largest component holds fewer than `k` cells.
pub fn random_instance(map: &GridMap, k: usize, seed: u64) -> Instance {
    let graph = std::sync::Arc::new(grid_to_graph(map));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Largest connected component by repeated BFS over unseen vertices.
    let n = graph.vertex_count();
    let mut component = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for v in 0..n as Vertex {
        if component[v as usize] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let dist = bfs_distances(&graph, v);
        let mut size = 0usize;
        for (u, &d) in dist.iter().enumerate() {
            if d != INFINITY {
                component[u] = id;
                size += 1;
            }
        }
        sizes.push(size);
    }
    let largest = sizes
        .iter()
        .enumerate()
        .max_by_key(|&(_, s)| s)
        .map(|(i, _)| i)
        .expect("map has no passable cells");
    let mut pool: Vec<Vertex> = (0..n as Vertex)
        .filter(|&v| component[v as usize] == largest)
        .collect();
    assert!(
        pool.len() >= k,
        "largest component has {} cells, need {k}",
        pool.len()
    );

    pool.shuffle(&mut rng);
    let starts = pool[..k].to_vec();
    let mut goal_pool = pool;
    goal_pool.shuffle(&mut rng);
    let goals = goal_pool[..k].to_vec();

    Instance::new(graph, starts, goals).expect("sampled instance must be valid")
}
