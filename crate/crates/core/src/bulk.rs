//! Bulk Search: augmenting-path search that expands connected-sequences.
//!
//! The traversal orders its open set by level and expands whole sequence
//! suffixes implicitly. Expanding a node `(v, h)` inside the sequence
//! `[h_min, h_max]` stands in for all of `(v, h..h_max)`: the two boundary
//! nodes (which are the only ones that may carry reversed edges) are
//! expanded in full, and for every neighboring connected-sequence only the
//! lowest node reachable by a move edge from the interior is generated.
//! A node is skipped when a lower node of its own sequence has already been
//! opened, since that node's suffix covers it.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::graph::Vertex;
use crate::search::{SearchContext, SearchTimeout};
use crate::ten::{EdgeKind, Level, NetworkNode, Step, TENetwork};

/// A generated successor together with the edge that produced it. `tail` is
/// the actual tail node of that edge, which may sit above the expanded
/// node; path reconstruction splices the missing vertical run back in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Emission {
    pub node: NetworkNode,
    pub kind: EdgeKind,
    pub tail: NetworkNode,
}

/// Everything a search inserted or expanded, for diagnostics and tests.
#[derive(Debug, Default)]
pub struct SearchTrace {
    pub expanded: Vec<NetworkNode>,
    pub inserted: Vec<Emission>,
}

/// Bulk successor generation for one popped node.
///
/// The interior scan visits, per neighbor vertex, only the connected-
/// sequences overlapping the reachable window, so its cost is proportional
/// to the number of emitted nodes rather than to the suffix length.
pub fn get_successors(net: &TENetwork, node: NetworkNode) -> Vec<Emission> {
    let mut out = Vec::new();
    fill_successors(net, node, &mut out);
    out
}

fn fill_successors(net: &TENetwork, node: NetworkNode, out: &mut Vec<Emission>) {
    match node {
        NetworkNode::Sink => {}
        NetworkNode::Source => {
            net.for_each_residual_neighbor(node, |n, kind| {
                out.push(Emission {
                    node: n,
                    kind,
                    tail: NetworkNode::Source,
                })
            });
        }
        NetworkNode::Grid { vertex: v, level } => {
            let seq = net.sequence_of(v, level);
            let (h_min, h_max) = (seq.lo, seq.hi);

            // Boundary nodes are expanded in full: they are the only nodes
            // of the suffix that may touch reversed edges.
            if level == h_min {
                let tail = NetworkNode::grid(v, h_min);
                net.for_each_residual_neighbor(tail, |n, kind| {
                    out.push(Emission { node: n, kind, tail })
                });
            }
            if !(level == h_min && h_max == h_min) {
                let tail = NetworkNode::grid(v, h_max);
                net.for_each_residual_neighbor(tail, |n, kind| {
                    out.push(Emission { node: n, kind, tail })
                });
            }

            // Interior nodes carry only plain move edges. For each
            // neighboring sequence, emit the lowest inner copy reachable
            // from an outer copy in [max(h_min+1, level), h_max-1].
            if h_max == 0 {
                return;
            }
            let from_lo = h_min.saturating_add(1).max(level);
            let from_hi = h_max - 1;
            if from_lo > from_hi {
                return;
            }
            let c_from = if from_lo % 2 == 0 { from_lo } else { from_lo + 1 };
            if c_from > from_hi {
                return;
            }

            for &u in net.graph().neighbors(v) {
                // Walk u's sequences that overlap target levels
                // [c_from + 1, h_max].
                let mut probe = c_from + 1;
                loop {
                    let cs = net.sequence_of(u, probe);
                    let (h_l, h_u) = (cs.lo, cs.hi);
                    let c_to = if h_l % 2 == 1 { h_l } else { h_l + 1 };
                    if c_to <= h_u && c_to <= h_max && c_from < h_u {
                        let c_min = c_to.max(c_from + 1);
                        out.push(Emission {
                            node: NetworkNode::grid(u, c_min),
                            kind: EdgeKind::Move,
                            tail: NetworkNode::grid(v, c_min - 1),
                        });
                    }
                    if h_u >= h_max || h_u >= net.top_level() {
                        break;
                    }
                    probe = h_u + 1;
                }
            }
        }
    }
}

struct Record {
    node: NetworkNode,
    parent: u32,
    kind: EdgeKind,
    tail: NetworkNode,
}

const NO_PARENT: u32 = u32::MAX;

fn heap_key(node: NetworkNode) -> (Level, Vertex) {
    // The sink carries no height; it sorts first so the search returns as
    // soon as a route to it has been generated instead of draining every
    // lower level.
    match node {
        NetworkNode::Source => (0, 0),
        NetworkNode::Sink => (0, 0),
        NetworkNode::Grid { vertex, level } => (level, vertex),
    }
}

/// Find a source-to-sink residual path, or `None` when the flow is maximal.
pub fn find_augmenting_path(
    net: &TENetwork,
    ctx: &mut SearchContext,
) -> Result<Option<Vec<Step>>, SearchTimeout> {
    run(net, ctx, None)
}

/// Same as [`find_augmenting_path`] but records every expansion and
/// insertion.
pub fn find_augmenting_path_traced(
    net: &TENetwork,
    ctx: &mut SearchContext,
) -> Result<(Option<Vec<Step>>, SearchTrace), SearchTimeout> {
    let mut trace = SearchTrace::default();
    let path = run(net, ctx, Some(&mut trace))?;
    Ok((path, trace))
}

fn run(
    net: &TENetwork,
    ctx: &mut SearchContext,
    mut trace: Option<&mut SearchTrace>,
) -> Result<Option<Vec<Step>>, SearchTimeout> {
    let mut records: Vec<Record> = Vec::new();
    // Min-heap on (level, vertex, insertion number) for full determinism.
    let mut open: BinaryHeap<Reverse<(Level, Vertex, u64, u32)>> = BinaryHeap::new();
    let mut inserted: FxHashSet<NetworkNode> = FxHashSet::default();
    let mut closed: FxHashSet<NetworkNode> = FxHashSet::default();
    let mut seq_min_inserted: FxHashMap<(Vertex, Level), Level> = FxHashMap::default();
    let mut seq_min_closed: FxHashMap<(Vertex, Level), Level> = FxHashMap::default();
    let mut ticket: u64 = 0;
    let mut successors: Vec<Emission> = Vec::new();

    records.push(Record {
        node: NetworkNode::Source,
        parent: NO_PARENT,
        kind: EdgeKind::Source,
        tail: NetworkNode::Source,
    });
    inserted.insert(NetworkNode::Source);
    let (level, vkey) = heap_key(NetworkNode::Source);
    open.push(Reverse((level, vkey, ticket, 0)));

    while let Some(Reverse((_, _, _, rec_idx))) = open.pop() {
        let node = records[rec_idx as usize].node;
        if node == NetworkNode::Sink {
            return Ok(Some(reconstruct(net, &records, rec_idx)));
        }
        if closed.contains(&node) {
            continue;
        }
        if let NetworkNode::Grid { vertex, level } = node {
            // A lower closed node of the same sequence has already expanded
            // this node implicitly.
            let seq_id = net.sequence_of(vertex, level).id();
            if seq_min_closed.get(&seq_id).is_some_and(|&m| m <= level) {
                continue;
            }
            let entry = seq_min_closed.entry(seq_id).or_insert(level);
            *entry = (*entry).min(level);
        }
        closed.insert(node);
        ctx.tick()?;
        if let Some(trace) = trace.as_deref_mut() {
            trace.expanded.push(node);
        }

        successors.clear();
        fill_successors(net, node, &mut successors);
        for &em in &successors {
            if inserted.contains(&em.node) {
                continue;
            }
            if let NetworkNode::Grid { vertex, level } = em.node {
                let seq_id = net.sequence_of(vertex, level).id();
                if seq_min_inserted.get(&seq_id).is_some_and(|&m| m <= level) {
                    continue;
                }
                let entry = seq_min_inserted.entry(seq_id).or_insert(level);
                *entry = (*entry).min(level);
            }
            inserted.insert(em.node);
            ticket += 1;
            ctx.generated += 1;
            if let Some(trace) = trace.as_deref_mut() {
                trace.inserted.push(em);
            }
            let (level, vkey) = heap_key(em.node);
            records.push(Record {
                node: em.node,
                parent: rec_idx,
                kind: em.kind,
                tail: em.tail,
            });
            open.push(Reverse((level, vkey, ticket, records.len() as u32 - 1)));
        }
    }
    Ok(None)
}

/// Expand the parent chain into an explicit edge-by-edge residual path,
/// splicing in the vertical runs that bulk generation skipped over.
fn reconstruct(net: &TENetwork, records: &[Record], sink_idx: u32) -> Vec<Step> {
    let mut chain = Vec::new();
    let mut idx = sink_idx;
    while records[idx as usize].parent != NO_PARENT {
        chain.push(idx);
        idx = records[idx as usize].parent;
    }
    chain.reverse();

    let mut steps = Vec::new();
    for idx in chain {
        let rec = &records[idx as usize];
        let parent_node = records[rec.parent as usize].node;
        if let (
            NetworkNode::Grid {
                vertex: pv,
                level: pl,
            },
            NetworkNode::Grid {
                vertex: tv,
                level: tl,
            },
        ) = (parent_node, rec.tail)
        {
            assert_eq!(pv, tv, "emission tail must share the parent's vertex");
            let seq = net.sequence_of(pv, pl);
            assert!(
                tl >= pl && tl <= seq.hi,
                "splice from level {pl} to {tl} would cross a cut"
            );
            for l in pl..tl {
                let kind = if l % 2 == 0 {
                    EdgeKind::Wait
                } else {
                    EdgeKind::Restriction
                };
                steps.push(Step {
                    from: NetworkNode::grid(pv, l),
                    to: NetworkNode::grid(pv, l + 1),
                    kind,
                });
            }
        }
        steps.push(Step {
            from: rec.tail,
            to: rec.node,
            kind: rec.kind,
        });
    }
    steps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::grid_to_graph;
    use crate::movingai::parse_map;

    fn corridor_graph(n: usize) -> crate::graph::Graph {
        let row = ".".repeat(n);
        grid_to_graph(&parse_map(&format!("type octile\nheight 1\nwidth {n}\nmap\n{row}\n")).unwrap())
    }

    fn grid(v: Vertex, level: Level) -> NetworkNode {
        NetworkNode::grid(v, level)
    }

    fn ctx() -> SearchContext {
        SearchContext::new(None)
    }

    #[test]
    fn successors_of_fresh_level_zero_node() {
        // Two-vertex corridor, T = 2: the bulk at v covers levels 0..4.
        let g = corridor_graph(2);
        let net = TENetwork::new(&g, &[0], &[1], 2).unwrap();
        let succ = get_successors(&net, grid(0, 0));
        let nodes: Vec<NetworkNode> = succ.iter().map(|e| e.node).collect();
        // Boundary at level 0 yields the wait and move neighbors; the
        // interior bulk reaches u's sequence lowest at (u, 3) via (v, 2).
        assert_eq!(nodes, vec![grid(0, 1), grid(1, 1), grid(1, 3)]);
        assert_eq!(succ[2].tail, grid(0, 2));
        assert_eq!(succ[2].kind, EdgeKind::Move);
    }

    #[test]
    fn successors_of_singleton_sequence() {
        // After the first worked-example augmentation, (D, 2) is the
        // singleton [2, 2]: only its own residual neighbors come out.
        let g = corridor_graph(6);
        let mut net = TENetwork::new(&g, &[2, 5], &[0, 3], 2).unwrap();
        let path = find_augmenting_path(&net, &mut ctx()).unwrap().unwrap();
        net.reverse_path(&path).unwrap();
        let seq = net.sequence_of(3, 2);
        assert_eq!((seq.lo, seq.hi), (2, 2));
        let succ = get_successors(&net, grid(3, 2));
        let expected = net.residual_neighbors(grid(3, 2));
        assert_eq!(succ.len(), expected.len());
        for (em, (n, k)) in succ.iter().zip(expected) {
            assert_eq!((em.node, em.kind, em.tail), (n, k, grid(3, 2)));
        }
    }

    #[test]
    fn finds_path_on_fresh_example_network() {
        let g = corridor_graph(6);
        let net = TENetwork::new(&g, &[2, 5], &[0, 3], 2).unwrap();
        let path = find_augmenting_path(&net, &mut ctx()).unwrap();
        assert!(path.is_some());
    }

    #[test]
    fn returns_none_when_sinks_used() {
        let g = corridor_graph(6);
        let mut net = TENetwork::new(&g, &[2, 5], &[0, 3], 2).unwrap();
        for _ in 0..2 {
            let path = find_augmenting_path(&net, &mut ctx()).unwrap().unwrap();
            net.reverse_path(&path).unwrap();
        }
        assert!(find_augmenting_path(&net, &mut ctx()).unwrap().is_none());
    }

    #[test]
    fn second_round_reroutes_through_reversed_column() {
        // The second augmentation must ride D's reversed column down and
        // leave through C, exactly as in the worked example.
        let g = corridor_graph(6);
        let mut net = TENetwork::new(&g, &[2, 5], &[0, 3], 2).unwrap();
        let first = find_augmenting_path(&net, &mut ctx()).unwrap().unwrap();
        net.reverse_path(&first).unwrap();
        let second = find_augmenting_path(&net, &mut ctx()).unwrap().unwrap();
        let visited: Vec<NetworkNode> = std::iter::once(second[0].from)
            .chain(second.iter().map(|s| s.to))
            .collect();
        assert_eq!(
            visited,
            vec![
                NetworkNode::Source,
                grid(5, 0),
                grid(4, 1),
                grid(4, 2),
                grid(3, 3),
                grid(3, 2),
                grid(3, 1),
                grid(2, 0),
                grid(1, 1),
                grid(1, 2),
                grid(0, 3),
                grid(0, 4),
                NetworkNode::Sink,
            ]
        );
        net.reverse_path(&second).unwrap();
        assert_eq!(net.flow_value(), 2);
    }

    #[test]
    fn reconstruction_splices_vertical_run() {
        // Start sitting on a goal: the sink edge leaves (v, 4) while the
        // parent was expanded at (v, 0), so reconstruction must splice the
        // whole vertical run back in.
        let g = corridor_graph(2);
        let net = TENetwork::new(&g, &[0, 1], &[0, 1], 2).unwrap();
        let path = find_augmenting_path(&net, &mut ctx()).unwrap().unwrap();
        let visited: Vec<NetworkNode> = std::iter::once(path[0].from)
            .chain(path.iter().map(|s| s.to))
            .collect();
        assert_eq!(
            visited,
            vec![
                NetworkNode::Source,
                grid(0, 0),
                grid(0, 1),
                grid(0, 2),
                grid(0, 3),
                grid(0, 4),
                NetworkNode::Sink,
            ]
        );
        let kinds: Vec<EdgeKind> = path.iter().map(|s| s.kind).collect();
        assert_eq!(
            kinds,
            vec![
                EdgeKind::Source,
                EdgeKind::Wait,
                EdgeKind::Restriction,
                EdgeKind::Wait,
                EdgeKind::Restriction,
                EdgeKind::Sink,
            ]
        );
    }

    #[test]
    fn move_from_parent_level_needs_no_splice() {
        let g = corridor_graph(2);
        let net = TENetwork::new(&g, &[0], &[1], 2).unwrap();
        let path = find_augmenting_path(&net, &mut ctx()).unwrap().unwrap();
        // Source, move directly at the parent's level 0, then the forced
        // vertical run at the goal.
        assert_eq!(path.len(), 6);
        assert_eq!(path[1].from, grid(0, 0));
        assert_eq!(path[1].kind, EdgeKind::Move);
        for w in path.windows(2) {
            assert_eq!(w[0].to, w[1].from);
        }
    }

    #[test]
    fn deterministic_across_runs() {
        let g = corridor_graph(6);
        let net = TENetwork::new(&g, &[2, 5], &[0, 3], 2).unwrap();
        let mut c1 = ctx();
        let mut c2 = ctx();
        let p1 = find_augmenting_path(&net, &mut c1).unwrap();
        let p2 = find_augmenting_path(&net, &mut c2).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(c1.expansions, c2.expansions);
        assert_eq!(c1.generated, c2.generated);
    }
}
