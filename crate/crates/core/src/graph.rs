//! Grid-to-graph conversion and BFS distances.

use crate::movingai::GridMap;

/// Vertex id in a [`Graph`]; indexes the adjacency table.
pub type Vertex = u32;

/// Distance marker for unreachable vertices.
pub const INFINITY: u32 = u32::MAX;

/// Undirected unit-cost graph with an optional grid-cell embedding.
///
/// For grid-derived graphs there is one vertex per passable cell and an edge
/// between 4-adjacent passable cells. Neighbor lists are kept in a fixed
/// order (up, down, left, right for grids) so traversals are deterministic.
#[derive(Debug, Clone)]
pub struct Graph {
    adjacency: Vec<Vec<Vertex>>,
    /// Cell behind each vertex; empty for non-grid graphs.
    cells: Vec<(usize, usize)>,
    /// Row-major cell -> vertex table; empty for non-grid graphs.
    vertex_at: Vec<Option<Vertex>>,
    grid_width: usize,
}

impl Graph {
    /// Build an abstract graph from undirected edges over `n` vertices.
    pub fn from_undirected_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            assert!(u != v, "self-loop");
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Graph {
            adjacency,
            cells: Vec::new(),
            vertex_at: Vec::new(),
            grid_width: 0,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v as usize]
    }

    /// Grid cell behind vertex `v`; panics for non-grid graphs.
    pub fn cell_of(&self, v: Vertex) -> (usize, usize) {
        self.cells[v as usize]
    }

    /// Vertex at grid cell `(x, y)`, if the cell is passable.
    pub fn vertex_at(&self, x: usize, y: usize) -> Option<Vertex> {
        if self.grid_width == 0 {
            return None;
        }
        self.vertex_at
            .get(y * self.grid_width + x)
            .copied()
            .flatten()
    }

    pub fn is_grid(&self) -> bool {
        !self.cells.is_empty()
    }
}

/// One vertex per passable cell, edges between 4-adjacent passable cells.
pub fn grid_to_graph(map: &GridMap) -> Graph {
    let (w, h) = (map.width(), map.height());
    let mut vertex_at: Vec<Option<Vertex>> = vec![None; w * h];
    let mut cells = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if map.is_passable(x, y) {
                vertex_at[y * w + x] = Some(cells.len() as Vertex);
                cells.push((x, y));
            }
        }
    }

    // Neighbor order: up, down, left, right.
    let mut adjacency = vec![Vec::new(); cells.len()];
    for (v, &(x, y)) in cells.iter().enumerate() {
        let mut push = |nx: usize, ny: usize| {
            if let Some(u) = vertex_at[ny * w + nx] {
                adjacency[v].push(u);
            }
        };
        if y > 0 {
            push(x, y - 1);
        }
        if y + 1 < h {
            push(x, y + 1);
        }
        if x > 0 {
            push(x - 1, y);
        }
        if x + 1 < w {
            push(x + 1, y);
        }
    }

    Graph {
        adjacency,
        cells,
        vertex_at,
        grid_width: w,
    }
}

/// Unit-cost shortest distances from `source`; unreachable = [`INFINITY`].
pub fn bfs_distances(graph: &Graph, source: Vertex) -> Vec<u32> {
    let mut dist = vec![INFINITY; graph.vertex_count()];
    let mut queue = std::collections::VecDeque::new();
    dist[source as usize] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize];
        for &u in graph.neighbors(v) {
            if dist[u as usize] == INFINITY {
                dist[u as usize] = d + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}
