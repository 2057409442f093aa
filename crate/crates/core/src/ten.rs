//! Implicit time-expanded network with unit capacities.
//!
//! For a horizon `T` the network conceptually holds `2T + 1` copies of the
//! graph's vertices. Copies are addressed by a single integer *level*:
//! level 0 is the start copy, odd level `2t - 1` is the inner copy of time
//! step `t`, and even level `2t` is the outer copy `t'`. Move and wait
//! edges go from an even level `L` to `L + 1` (a move switches vertex, a
//! wait stays); restriction edges go from an odd level `L` to `L + 1` at
//! the same vertex and force vertex-disjointness of unit paths. The source
//! connects to every start at level 0 and every goal connects from level
//! `2T` to the sink.
//!
//! Nothing is materialized per node. The only state is which edges are
//! currently reversed by augmentation: per-vertex cut sets for vertical
//! (wait/restriction) edges, a map of reversed move edges, and used flags
//! for source/sink edges. A run of levels at one vertex with no cut inside
//! is a *connected-sequence*, the unit the bulk search expands.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::graph::{Graph, Vertex};

/// Level index in `[0, 2T]`. Even levels (including 0) are the tails of
/// move/wait edges; odd levels are the inner copies move edges land on.
pub type Level = u32;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("horizon must be at least 1, got {0}")]
    InvalidHorizon(u32),

    #[error("path step not traversable: {0}")]
    UntraversableEdge(String),

    #[error("dangling flow at vertex {vertex} level {level}")]
    DanglingFlow { vertex: Vertex, level: Level },

    #[error("flow value {flow} does not saturate all {agents} agents")]
    NotSaturated { flow: u32, agents: u32 },
}

/// A node of the time-expanded network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NetworkNode {
    Source,
    Sink,
    Grid { vertex: Vertex, level: Level },
}

impl NetworkNode {
    pub fn grid(vertex: Vertex, level: Level) -> Self {
        NetworkNode::Grid { vertex, level }
    }

    pub fn level(&self) -> Option<Level> {
        match self {
            NetworkNode::Grid { level, .. } => Some(*level),
            _ => None,
        }
    }
}

/// How a residual step traverses an edge. `Rev*` kinds walk a reversed
/// edge backward, cancelling its unit of flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Source,
    Wait,
    Move,
    Restriction,
    Sink,
    RevWait,
    RevMove,
    RevRestriction,
}

impl EdgeKind {
    pub fn is_residual(self) -> bool {
        matches!(
            self,
            EdgeKind::RevWait | EdgeKind::RevMove | EdgeKind::RevRestriction
        )
    }
}

/// One traversal step of a residual path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub from: NetworkNode,
    pub to: NetworkNode,
    pub kind: EdgeKind,
}

/// Maximal run `[lo, hi]` of levels at `vertex` with no reversed vertical
/// edge inside.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConnectedSequence {
    pub vertex: Vertex,
    pub lo: Level,
    pub hi: Level,
}

impl ConnectedSequence {
    /// Stable identity within one augmentation round.
    pub fn id(&self) -> (Vertex, Level) {
        (self.vertex, self.lo)
    }
}

/// The implicit network plus its current reversal state.
pub struct TENetwork<'g> {
    graph: &'g Graph,
    t: u32,
    /// `c` present at vertex `v` iff the vertical edge `(v,c) -> (v,c+1)`
    /// is reversed.
    cuts: Vec<BTreeSet<Level>>,
    /// Reversed move edges keyed per tail vertex by even level -> head
    /// vertex. At most one per node since every node carries at most one
    /// unit of flow.
    rev_move_out: Vec<BTreeMap<Level, Vertex>>,
    /// Same edges keyed per head vertex by odd level -> tail vertex.
    rev_move_in: Vec<BTreeMap<Level, Vertex>>,
    starts: Vec<Vertex>,
    goals: Vec<Vertex>,
    is_goal: Vec<bool>,
    source_used: Vec<bool>,
    sink_used: Vec<bool>,
    used_count: u32,
    /// Number of sequence splits so far (one new sequence per inserted cut).
    splits: u64,
}

impl<'g> TENetwork<'g> {
    /// Build a fresh network. Only O(|V|) bookkeeping is allocated; nothing
    /// scales with `t` until paths are reversed.
    pub fn new(
        graph: &'g Graph,
        starts: &[Vertex],
        goals: &[Vertex],
        t: u32,
    ) -> Result<Self, NetworkError> {
        if t < 1 {
            return Err(NetworkError::InvalidHorizon(t));
        }
        let n = graph.vertex_count();
        let mut is_goal = vec![false; n];
        for &g in goals {
            is_goal[g as usize] = true;
        }
        Ok(TENetwork {
            graph,
            t,
            cuts: vec![BTreeSet::new(); n],
            rev_move_out: vec![BTreeMap::new(); n],
            rev_move_in: vec![BTreeMap::new(); n],
            starts: starts.to_vec(),
            goals: goals.to_vec(),
            is_goal,
            source_used: vec![false; n],
            sink_used: vec![false; n],
            used_count: 0,
            splits: 0,
        })
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn horizon(&self) -> u32 {
        self.t
    }

    /// Highest level, `2T`.
    pub fn top_level(&self) -> Level {
        2 * self.t
    }

    pub fn starts(&self) -> &[Vertex] {
        &self.starts
    }

    pub fn goals(&self) -> &[Vertex] {
        &self.goals
    }

    /// Units of flow currently routed source to sink.
    pub fn flow_value(&self) -> u32 {
        self.used_count
    }

    pub fn source_used(&self, v: Vertex) -> bool {
        self.source_used[v as usize]
    }

    pub fn sink_used(&self, v: Vertex) -> bool {
        self.sink_used[v as usize]
    }

    /// Total connected-sequences created by splits so far.
    pub fn sequences_created(&self) -> u64 {
        self.splits
    }

    /// Total reversed vertical edges; zero on a fresh network.
    pub fn cut_count(&self) -> usize {
        self.cuts.iter().map(BTreeSet::len).sum()
    }

    pub fn reversed_move_count(&self) -> usize {
        self.rev_move_out.iter().map(BTreeMap::len).sum()
    }

    fn is_cut(&self, v: Vertex, c: Level) -> bool {
        self.cuts[v as usize].contains(&c)
    }

    /// The maximal uncut interval containing `level` at `vertex`.
    pub fn sequence_of(&self, vertex: Vertex, level: Level) -> ConnectedSequence {
        debug_assert!(level <= self.top_level());
        let cuts = &self.cuts[vertex as usize];
        let lo = cuts
            .range(..level)
            .next_back()
            .map(|&c| c + 1)
            .unwrap_or(0);
        let hi = cuts
            .range(level..)
            .next()
            .copied()
            .unwrap_or_else(|| self.top_level());
        ConnectedSequence { vertex, lo, hi }
    }

    /// All one-step residual successors of `node`: forward over non-reversed
    /// edges plus backward over reversed ones. Source edges lead to unused
    /// starts and sink edges leave unused goals.
    pub fn residual_neighbors(&self, node: NetworkNode) -> Vec<(NetworkNode, EdgeKind)> {
        let mut out = Vec::new();
        self.for_each_residual_neighbor(node, |n, k| out.push((n, k)));
        out
    }

    pub(crate) fn for_each_residual_neighbor(
        &self,
        node: NetworkNode,
        mut f: impl FnMut(NetworkNode, EdgeKind),
    ) {
        match node {
            NetworkNode::Source => {
                for &s in &self.starts {
                    if !self.source_used[s as usize] {
                        f(NetworkNode::grid(s, 0), EdgeKind::Source);
                    }
                }
            }
            NetworkNode::Sink => {}
            NetworkNode::Grid { vertex: v, level } => {
                let top = self.top_level();
                if level % 2 == 0 && level < top {
                    if !self.is_cut(v, level) {
                        f(NetworkNode::grid(v, level + 1), EdgeKind::Wait);
                    }
                    let reversed_to = self.rev_move_out[v as usize].get(&level).copied();
                    for &u in self.graph.neighbors(v) {
                        if reversed_to != Some(u) {
                            f(NetworkNode::grid(u, level + 1), EdgeKind::Move);
                        }
                    }
                } else if level % 2 == 1 && !self.is_cut(v, level) {
                    f(NetworkNode::grid(v, level + 1), EdgeKind::Restriction);
                }
                if level == top && self.is_goal[v as usize] && !self.sink_used[v as usize] {
                    f(NetworkNode::Sink, EdgeKind::Sink);
                }
                if level > 0 && self.is_cut(v, level - 1) {
                    let kind = if (level - 1) % 2 == 0 {
                        EdgeKind::RevWait
                    } else {
                        EdgeKind::RevRestriction
                    };
                    f(NetworkNode::grid(v, level - 1), kind);
                }
                if level % 2 == 1 {
                    if let Some(&u) = self.rev_move_in[v as usize].get(&level) {
                        f(NetworkNode::grid(u, level - 1), EdgeKind::RevMove);
                    }
                }
            }
        }
    }

    fn insert_cut(&mut self, v: Vertex, c: Level) -> Result<(), NetworkError> {
        if !self.cuts[v as usize].insert(c) {
            return Err(NetworkError::UntraversableEdge(format!(
                "vertical edge at vertex {v} level {c} already reversed"
            )));
        }
        self.splits += 1;
        Ok(())
    }

    fn remove_cut(&mut self, v: Vertex, c: Level) -> Result<(), NetworkError> {
        if !self.cuts[v as usize].remove(&c) {
            return Err(NetworkError::UntraversableEdge(format!(
                "vertical edge at vertex {v} level {c} is not reversed"
            )));
        }
        Ok(())
    }

    fn apply_step(&mut self, step: &Step) -> Result<(), NetworkError> {
        let bad = |msg: String| Err(NetworkError::UntraversableEdge(msg));
        match (step.kind, step.from, step.to) {
            (EdgeKind::Source, NetworkNode::Source, NetworkNode::Grid { vertex, level: 0 }) => {
                if !self.starts.contains(&vertex) || self.source_used[vertex as usize] {
                    return bad(format!("source edge to {vertex} unavailable"));
                }
                self.source_used[vertex as usize] = true;
                self.used_count += 1;
                Ok(())
            }
            (EdgeKind::Sink, NetworkNode::Grid { vertex, level }, NetworkNode::Sink)
                if level == self.top_level() =>
            {
                if !self.is_goal[vertex as usize] || self.sink_used[vertex as usize] {
                    return bad(format!("sink edge from {vertex} unavailable"));
                }
                self.sink_used[vertex as usize] = true;
                Ok(())
            }
            (
                EdgeKind::Wait | EdgeKind::Restriction,
                NetworkNode::Grid { vertex, level },
                NetworkNode::Grid {
                    vertex: v2,
                    level: l2,
                },
            ) if v2 == vertex && l2 == level + 1 => {
                let want_even = step.kind == EdgeKind::Wait;
                if (level % 2 == 0) != want_even {
                    return bad(format!("vertical edge parity mismatch at level {level}"));
                }
                self.insert_cut(vertex, level)
            }
            (
                EdgeKind::RevWait | EdgeKind::RevRestriction,
                NetworkNode::Grid { vertex, level },
                NetworkNode::Grid {
                    vertex: v2,
                    level: l2,
                },
            ) if v2 == vertex && l2 + 1 == level => {
                let want_even = step.kind == EdgeKind::RevWait;
                if (l2 % 2 == 0) != want_even {
                    return bad(format!("vertical edge parity mismatch at level {l2}"));
                }
                self.remove_cut(vertex, l2)
            }
            (
                EdgeKind::Move,
                NetworkNode::Grid { vertex, level },
                NetworkNode::Grid {
                    vertex: head,
                    level: l2,
                },
            ) if l2 == level + 1 && level % 2 == 0 => {
                if !self.graph.neighbors(vertex).contains(&head) {
                    return bad(format!("no graph edge {vertex}-{head}"));
                }
                if self.rev_move_out[vertex as usize]
                    .insert(level, head)
                    .is_some()
                {
                    return bad(format!("move tail ({vertex},{level}) already carries flow"));
                }
                if self.rev_move_in[head as usize].insert(l2, vertex).is_some() {
                    return bad(format!("move head ({head},{l2}) already carries flow"));
                }
                Ok(())
            }
            (
                EdgeKind::RevMove,
                NetworkNode::Grid { vertex, level },
                NetworkNode::Grid {
                    vertex: tail,
                    level: l2,
                },
            ) if l2 + 1 == level => {
                if self.rev_move_out[tail as usize].remove(&l2) != Some(vertex) {
                    return bad(format!("move edge ({tail},{l2})->{vertex} is not reversed"));
                }
                self.rev_move_in[vertex as usize].remove(&level);
                Ok(())
            }
            _ => bad(format!("malformed step {step:?}")),
        }
    }

    /// Flip every edge of a source-to-sink residual path: forward edges
    /// become reversed, residually traversed edges become plain again
    /// (adjacent sequences merge back).
    ///
    /// The path must be node-simple (both engines guarantee this). Residual
    /// steps are applied before forward ones: the flip is set-wise, and a
    /// path may push new flow into a node in the same round that cancels
    /// the node's old unit, which would otherwise collide transiently.
    pub fn reverse_path(&mut self, path: &[Step]) -> Result<(), NetworkError> {
        if path.first().map(|s| s.from) != Some(NetworkNode::Source)
            || path.last().map(|s| s.to) != Some(NetworkNode::Sink)
        {
            return Err(NetworkError::UntraversableEdge(
                "path must run source to sink".into(),
            ));
        }
        for window in path.windows(2) {
            if window[0].to != window[1].from {
                return Err(NetworkError::UntraversableEdge(
                    "path steps are not contiguous".into(),
                ));
            }
        }
        for step in path.iter().filter(|s| s.kind.is_residual()) {
            self.apply_step(step)?;
        }
        for step in path.iter().filter(|s| !s.kind.is_residual()) {
            self.apply_step(step)?;
        }
        #[cfg(debug_assertions)]
        {
            self.check_flow_conservation().expect("flow conservation");
            self.check_reversed_edge_locality()
                .expect("reversed-edge locality");
        }
        Ok(())
    }

    /// Follow each unit of flow from its start to a goal. Requires the flow
    /// to saturate all agents.
    pub fn extract_flow_paths(&self) -> Result<Vec<Vec<NetworkNode>>, NetworkError> {
        let k = self.starts.len() as u32;
        if self.flow_value() != k {
            return Err(NetworkError::NotSaturated {
                flow: self.flow_value(),
                agents: k,
            });
        }
        let top = self.top_level();
        let mut paths = Vec::with_capacity(self.starts.len());
        for &s in &self.starts {
            let mut nodes = vec![NetworkNode::grid(s, 0)];
            let (mut v, mut level) = (s, 0u32);
            while level < top {
                let vertical = self.is_cut(v, level);
                let moved = if level % 2 == 0 {
                    self.rev_move_out[v as usize].get(&level).copied()
                } else {
                    None
                };
                match (vertical, moved) {
                    (true, None) => level += 1,
                    (false, Some(u)) => {
                        v = u;
                        level += 1;
                    }
                    _ => return Err(NetworkError::DanglingFlow { vertex: v, level }),
                }
                nodes.push(NetworkNode::grid(v, level));
            }
            if !self.sink_used[v as usize] {
                return Err(NetworkError::DanglingFlow { vertex: v, level });
            }
            paths.push(nodes);
        }
        Ok(paths)
    }

    /// Reversed in-degree equals reversed out-degree at every grid node, and
    /// used sources balance used sinks.
    pub fn check_flow_conservation(&self) -> Result<(), String> {
        let mut degree: HashMap<NetworkNode, (i32, i32)> = HashMap::new();
        let mut add = |node: NetworkNode, inc_in: i32, inc_out: i32| {
            let e = degree.entry(node).or_insert((0, 0));
            e.0 += inc_in;
            e.1 += inc_out;
        };
        for (v, cuts) in self.cuts.iter().enumerate() {
            for &c in cuts {
                add(NetworkNode::grid(v as Vertex, c), 0, 1);
                add(NetworkNode::grid(v as Vertex, c + 1), 1, 0);
            }
        }
        for (v, moves) in self.rev_move_out.iter().enumerate() {
            for (&level, &u) in moves {
                add(NetworkNode::grid(v as Vertex, level), 0, 1);
                add(NetworkNode::grid(u, level + 1), 1, 0);
            }
        }
        for (s, &used) in self.source_used.iter().enumerate() {
            if used {
                add(NetworkNode::grid(s as Vertex, 0), 1, 0);
            }
        }
        for (g, &used) in self.sink_used.iter().enumerate() {
            if used {
                add(NetworkNode::grid(g as Vertex, self.top_level()), 0, 1);
            }
        }
        for (node, (inflow, outflow)) in &degree {
            if inflow != outflow {
                return Err(format!(
                    "conservation violated at {node:?}: in {inflow}, out {outflow}"
                ));
            }
            if *inflow > 1 {
                return Err(format!("node {node:?} carries {inflow} units"));
            }
        }
        let sources = self.source_used.iter().filter(|&&u| u).count();
        let sinks = self.sink_used.iter().filter(|&&u| u).count();
        if sources != sinks {
            return Err(format!(
                "terminal imbalance: {sources} sources vs {sinks} sinks"
            ));
        }
        Ok(())
    }

    /// Every reversed move edge must touch its connected-sequences only at
    /// their endpoints; the bulk successor generation relies on this.
    pub fn check_reversed_edge_locality(&self) -> Result<(), String> {
        for (v, moves) in self.rev_move_out.iter().enumerate() {
            for (&level, &u) in moves {
                let v = v as Vertex;
                let tail_seq = self.sequence_of(v, level);
                if level != tail_seq.lo && level != tail_seq.hi {
                    return Err(format!(
                        "reversed move tail ({v},{level}) is interior to [{},{}]",
                        tail_seq.lo, tail_seq.hi
                    ));
                }
                let head_seq = self.sequence_of(u, level + 1);
                if level + 1 != head_seq.lo && level + 1 != head_seq.hi {
                    return Err(format!(
                        "reversed move head ({u},{}) is interior to [{},{}]",
                        level + 1,
                        head_seq.lo,
                        head_seq.hi
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;
    use crate::graph::grid_to_graph;
    use crate::movingai::parse_map;

    fn corridor_graph(n: usize) -> Graph {
        let row = ".".repeat(n);
        grid_to_graph(&parse_map(&format!("type octile\nheight 1\nwidth {n}\nmap\n{row}\n")).unwrap())
    }

    /// Path graph A..F with starts {C, F} and goals {A, D}.
    fn example_net(graph: &Graph, t: u32) -> TENetwork<'_> {
        TENetwork::new(graph, &[2, 5], &[0, 3], t).unwrap()
    }

    fn grid(v: Vertex, level: Level) -> NetworkNode {
        NetworkNode::grid(v, level)
    }

    fn step(from: NetworkNode, to: NetworkNode, kind: EdgeKind) -> Step {
        Step { from, to, kind }
    }

    /// First augmenting path of the worked example: source, C at level 0,
    /// then D straight up to the sink.
    fn first_path() -> Vec<Step> {
        vec![
            step(NetworkNode::Source, grid(2, 0), EdgeKind::Source),
            step(grid(2, 0), grid(3, 1), EdgeKind::Move),
            step(grid(3, 1), grid(3, 2), EdgeKind::Restriction),
            step(grid(3, 2), grid(3, 3), EdgeKind::Wait),
            step(grid(3, 3), grid(3, 4), EdgeKind::Restriction),
            step(grid(3, 4), NetworkNode::Sink, EdgeKind::Sink),
        ]
    }

    /// Second path: from F, riding down D's reversed column and out of C.
    fn second_path() -> Vec<Step> {
        vec![
            step(NetworkNode::Source, grid(5, 0), EdgeKind::Source),
            step(grid(5, 0), grid(4, 1), EdgeKind::Move),
            step(grid(4, 1), grid(4, 2), EdgeKind::Restriction),
            step(grid(4, 2), grid(3, 3), EdgeKind::Move),
            step(grid(3, 3), grid(3, 2), EdgeKind::RevWait),
            step(grid(3, 2), grid(3, 1), EdgeKind::RevRestriction),
            step(grid(3, 1), grid(2, 0), EdgeKind::RevMove),
            step(grid(2, 0), grid(1, 1), EdgeKind::Move),
            step(grid(1, 1), grid(1, 2), EdgeKind::Restriction),
            step(grid(1, 2), grid(0, 3), EdgeKind::Move),
            step(grid(0, 3), grid(0, 4), EdgeKind::Restriction),
            step(grid(0, 4), NetworkNode::Sink, EdgeKind::Sink),
        ]
    }

    #[test]
    fn fresh_network_has_single_sequences() {
        let g = corridor_graph(6);
        let net = example_net(&g, 2);
        for v in 0..6 {
            for level in 0..=4 {
                let seq = net.sequence_of(v, level);
                assert_eq!((seq.lo, seq.hi), (0, 4));
            }
        }
    }

    #[test]
    fn rejects_zero_horizon() {
        let g = corridor_graph(2);
        assert!(matches!(
            TENetwork::new(&g, &[0], &[1], 0),
            Err(NetworkError::InvalidHorizon(0))
        ));
    }

    #[test]
    fn terminal_wiring() {
        // Starts {A, B}, goals {C, D} on the corridor.
        let g = corridor_graph(6);
        let net = TENetwork::new(&g, &[0, 1], &[2, 3], 2).unwrap();
        let from_source: Vec<NetworkNode> = net
            .residual_neighbors(NetworkNode::Source)
            .into_iter()
            .map(|(n, _)| n)
            .collect();
        assert_eq!(from_source, vec![grid(0, 0), grid(1, 0)]);
        for goal in [2, 3] {
            assert!(net
                .residual_neighbors(grid(goal, 4))
                .iter()
                .any(|&(n, k)| n == NetworkNode::Sink && k == EdgeKind::Sink));
        }
        for non_goal in [0, 1, 4, 5] {
            assert!(!net
                .residual_neighbors(grid(non_goal, 4))
                .iter()
                .any(|&(n, _)| n == NetworkNode::Sink));
        }
    }

    #[test]
    fn fresh_network_allocates_nothing_per_level() {
        let g = corridor_graph(6);
        let small = example_net(&g, 2);
        let large = example_net(&g, 1_000_000);
        for net in [&small, &large] {
            assert_eq!(net.cut_count(), 0);
            assert_eq!(net.reversed_move_count(), 0);
            assert_eq!(net.flow_value(), 0);
        }
    }

    #[test]
    fn residual_neighbors_fresh_start_node() {
        // B has two neighbors on the corridor.
        let g = corridor_graph(6);
        let net = TENetwork::new(&g, &[1], &[3], 2).unwrap();
        let succ = net.residual_neighbors(grid(1, 0));
        assert_eq!(
            succ,
            vec![
                (grid(1, 1), EdgeKind::Wait),
                (grid(0, 1), EdgeKind::Move),
                (grid(2, 1), EdgeKind::Move),
            ]
        );
    }

    #[test]
    fn inner_node_has_single_forward_successor() {
        let g = corridor_graph(6);
        let net = example_net(&g, 2);
        let succ = net.residual_neighbors(grid(1, 1));
        assert_eq!(succ, vec![(grid(1, 2), EdgeKind::Restriction)]);
    }

    #[test]
    fn reversed_move_offers_residual_step() {
        let g = corridor_graph(6);
        let mut net = example_net(&g, 2);
        net.apply_step(&step(grid(2, 0), grid(3, 1), EdgeKind::Move))
            .unwrap();
        assert!(net
            .residual_neighbors(grid(3, 1))
            .contains(&(grid(2, 0), EdgeKind::RevMove)));
    }

    #[test]
    fn reverse_first_example_path() {
        let g = corridor_graph(6);
        let mut net = example_net(&g, 2);
        net.reverse_path(&first_path()).unwrap();

        let cuts_d: Vec<Level> = (0..4).filter(|&c| net.is_cut(3, c)).collect();
        assert_eq!(cuts_d, vec![1, 2, 3]);
        assert!(net.source_used(2));
        assert!(net.sink_used(3));
        assert_eq!(net.rev_move_out[2].get(&0), Some(&3));
        assert_eq!(net.flow_value(), 1);

        assert_eq!(
            (net.sequence_of(3, 0).lo, net.sequence_of(3, 0).hi),
            (0, 1)
        );
        assert_eq!(
            (net.sequence_of(3, 2).lo, net.sequence_of(3, 2).hi),
            (2, 2)
        );
        assert_eq!(
            (net.sequence_of(3, 4).lo, net.sequence_of(3, 4).hi),
            (4, 4)
        );
    }

    #[test]
    fn sequence_at_cut_level_ends_there() {
        let g = corridor_graph(6);
        let mut net = example_net(&g, 2);
        net.insert_cut(3, 2).unwrap();
        let seq = net.sequence_of(3, 2);
        assert_eq!((seq.lo, seq.hi), (0, 2));
        let above = net.sequence_of(3, 3);
        assert_eq!((above.lo, above.hi), (3, 4));
    }

    #[test]
    fn vertical_reversal_is_involutive() {
        let g = corridor_graph(6);
        let mut net = example_net(&g, 2);
        net.apply_step(&step(grid(3, 2), grid(3, 3), EdgeKind::Wait))
            .unwrap();
        assert!(net.is_cut(3, 2));
        net.apply_step(&step(grid(3, 3), grid(3, 2), EdgeKind::RevWait))
            .unwrap();
        assert_eq!(net.cut_count(), 0);
        let seq = net.sequence_of(3, 2);
        assert_eq!((seq.lo, seq.hi), (0, 4));
    }

    #[test]
    fn conservation_after_each_augmentation() {
        let g = corridor_graph(6);
        let mut net = example_net(&g, 2);
        net.reverse_path(&first_path()).unwrap();
        net.check_flow_conservation().unwrap();
        net.check_reversed_edge_locality().unwrap();
        net.reverse_path(&second_path()).unwrap();
        net.check_flow_conservation().unwrap();
        net.check_reversed_edge_locality().unwrap();
        assert_eq!(net.flow_value(), 2);
    }

    #[test]
    fn untraversable_step_is_rejected() {
        let g = corridor_graph(6);
        let mut net = example_net(&g, 2);
        net.reverse_path(&first_path()).unwrap();
        // Reversing the same path again must fail on its first reversed edge.
        assert!(net.reverse_path(&first_path()).is_err());
    }

    #[test]
    fn extract_example_flow() {
        let g = corridor_graph(6);
        let mut net = example_net(&g, 2);
        net.reverse_path(&first_path()).unwrap();
        assert!(matches!(
            net.extract_flow_paths(),
            Err(NetworkError::NotSaturated { flow: 1, agents: 2 })
        ));
        net.reverse_path(&second_path()).unwrap();
        let paths = net.extract_flow_paths().unwrap();
        assert_eq!(paths.len(), 2);
        // Agent from C walks C, B, B, A, A; agent from F walks F, E, E, D, D.
        assert_eq!(
            paths[0],
            vec![grid(2, 0), grid(1, 1), grid(1, 2), grid(0, 3), grid(0, 4)]
        );
        assert_eq!(
            paths[1],
            vec![grid(5, 0), grid(4, 1), grid(4, 2), grid(3, 3), grid(3, 4)]
        );
    }

    #[test]
    fn extracted_paths_share_no_node() {
        let g = corridor_graph(6);
        let mut net = example_net(&g, 2);
        net.reverse_path(&first_path()).unwrap();
        net.reverse_path(&second_path()).unwrap();
        let paths = net.extract_flow_paths().unwrap();
        let mut seen = HashSet::new();
        for node in paths.iter().flatten() {
            assert!(seen.insert(*node), "shared node {node:?}");
        }
    }

    #[test]
    fn single_agent_adjacent_goal_t1() {
        let g = corridor_graph(2);
        let mut net = TENetwork::new(&g, &[0], &[1], 1).unwrap();
        net.reverse_path(&[
            step(NetworkNode::Source, grid(0, 0), EdgeKind::Source),
            step(grid(0, 0), grid(1, 1), EdgeKind::Move),
            step(grid(1, 1), grid(1, 2), EdgeKind::Restriction),
            step(grid(1, 2), NetworkNode::Sink, EdgeKind::Sink),
        ])
        .unwrap();
        let paths = net.extract_flow_paths().unwrap();
        assert_eq!(paths[0], vec![grid(0, 0), grid(1, 1), grid(1, 2)]);
    }

    #[test]
    fn sequences_partition_every_vertex() {
        let g = corridor_graph(6);
        let mut net = example_net(&g, 2);
        net.reverse_path(&first_path()).unwrap();
        net.reverse_path(&second_path()).unwrap();
        for v in 0..6 {
            let mut level = 0;
            while level <= net.top_level() {
                let seq = net.sequence_of(v, level);
                assert_eq!(seq.lo, level, "gap or overlap at vertex {v}");
                level = seq.hi + 1;
            }
        }
    }
}
