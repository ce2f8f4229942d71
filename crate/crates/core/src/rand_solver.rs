//! Logarithmic approximation for redundancy-aware network design.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laminar::{decompose_chains, preprocess, DemandTree};
use crate::model::{eval_rand_cost, NodeId, RandInstance, RandSolution, ShortestPathTree, TerminalId};
use crate::scalar::Scalar;
use crate::steiner::{walk_up, SteinerMethod, SteinerTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Variant {
    /// One Steiner tree per demand-tree node.
    #[default]
    PerNodeSteiner,
    /// Greedy attachment in the style of Prim's algorithm.
    Prim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct RandConfig {
    pub variant: Variant,
    pub steiner: SteinerMethod,
}

/// `floor(log2 p) + 1`, the bound on the number of chain collections of a
/// demand tree with `p` nodes.
pub fn log_levels(p: usize) -> u64 {
    u64::from(p.max(1).ilog2()) + 1
}

/// Proven ratio of the end-to-end pipeline (preprocessing included) against
/// the optimum of the raw instance. The Prim variant's factor is the claimed,
/// not proven, `8 (floor(log2 p) + 1)`.
pub fn ratio_bound(config: &RandConfig, p: usize) -> u64 {
    match config.variant {
        Variant::PerNodeSteiner => 4 * u64::from(config.steiner.alpha()) * log_levels(p),
        Variant::Prim => 8 * log_levels(p),
    }
}

/// Ancestors (strictly larger demand) and peers (identical demand) of every
/// terminal. Peers include the terminal itself.
#[derive(Debug, Clone, Default)]
pub struct TerminalRelations {
    pub anc: BTreeMap<TerminalId, Vec<TerminalId>>,
    pub peer: BTreeMap<TerminalId, Vec<TerminalId>>,
}

pub fn terminal_relations<S: Scalar>(inst: &RandInstance<S>) -> TerminalRelations {
    let mut rel = TerminalRelations::default();
    for t in inst.terminals() {
        let mut anc = Vec::new();
        let mut peer = Vec::new();
        for o in inst.terminals() {
            if o.demand == t.demand {
                peer.push(o.id);
            } else if t.demand.is_subset(&o.demand) {
                anc.push(o.id);
            }
        }
        rel.anc.insert(t.id, anc);
        rel.peer.insert(t.id, peer);
    }
    rel
}

/// Steiner tree built for one demand-tree node.
#[derive(Debug, Clone)]
pub struct NodeSteiner<S> {
    pub node: usize,
    pub weight: u64,
    pub tree: SteinerTree<S>,
}

impl<S: Scalar> NodeSteiner<S> {
    /// `w(X)` times the tree's edge cost.
    pub fn weighted_cost(&self) -> S {
        S::from_weight(self.weight) * self.tree.cost.clone()
    }
}

#[derive(Debug, Clone)]
pub struct SteinerRun<S> {
    pub solution: RandSolution,
    pub tree: DemandTree,
    /// Node order follows the depth-first preorder; nodes without terminals are skipped.
    pub node_trees: Vec<NodeSteiner<S>>,
}

fn require_preprocessed<S: Scalar>(inst: &RandInstance<S>) -> Result<DemandTree> {
    let tree = DemandTree::build(inst);
    match tree.halving_violation() {
        Some((parent, child)) => Err(Error::NotPreprocessed { parent, child }),
        None => Ok(tree),
    }
}

/// Per-node Steiner algorithm with its intermediate trees.
pub fn solve_rand_detailed<S: Scalar>(inst: &RandInstance<S>, steiner: SteinerMethod) -> Result<SteinerRun<S>> {
    let tree = require_preprocessed(inst)?;
    let source = inst.source();
    let work: Vec<usize> = tree.preorder().into_iter().filter(|&x| !tree.node(x).terminals.is_empty()).collect();
    let built: Vec<SteinerTree<S>> = work
        .par_iter()
        .map(|&x| {
            let mut required: Vec<NodeId> = tree.node(x).terminals.iter().map(|&t| inst.terminal(t).expect("tree terminal").node).collect();
            required.push(source);
            steiner.solve(inst.graph(), &required)
        })
        .collect::<Result<_>>()?;

    let mut solution = RandSolution::new();
    let mut node_trees = Vec::with_capacity(work.len());
    for (&x, st) in work.iter().zip(built) {
        let parent = st.rooted_at(inst.graph(), source);
        for &t in &tree.node(x).terminals {
            let from = inst.terminal(t).expect("tree terminal").node;
            let path = walk_up(&parent, source, from).ok_or_else(|| Error::Internal(format!("Steiner tree misses terminal {t}")))?;
            solution.insert(t, path);
        }
        node_trees.push(NodeSteiner { node: x, weight: tree.node(x).weight, tree: st });
    }
    Ok(SteinerRun { solution, tree, node_trees })
}

/// Routes every terminal along its own demand node's Steiner tree.
///
/// The instance must already satisfy the halving property (see
/// [`crate::laminar::preprocess`]).
pub fn solve_rand<S: Scalar>(inst: &RandInstance<S>, steiner: SteinerMethod) -> Result<RandSolution> {
    solve_rand_detailed(inst, steiner).map(|run| run.solution)
}

/// Drops cycles from a walk, keeping its endpoints.
fn erase_loops(walk: impl IntoIterator<Item = NodeId>) -> Vec<NodeId> {
    let mut path: Vec<NodeId> = Vec::new();
    let mut pos: HashMap<NodeId, usize> = HashMap::new();
    for v in walk {
        if let Some(&i) = pos.get(&v) {
            for dropped in path.drain(i + 1..) {
                pos.remove(&dropped);
            }
        } else {
            pos.insert(v, path.len());
            path.push(v);
        }
    }
    path
}

/// Prim-style variant: grow the connected set from the source, always
/// attaching the eligible terminal (every ancestor already connected) that is
/// closest to a connected ancestor, peer or the source.
pub fn solve_rand_prim<S: Scalar>(inst: &RandInstance<S>) -> Result<RandSolution> {
    require_preprocessed(inst)?;
    let source = inst.source();
    let terminals = inst.terminals();
    let index: HashMap<TerminalId, usize> = terminals.iter().enumerate().map(|(i, t)| (t.id, i)).collect();
    let rel = terminal_relations(inst);

    let mut locations: Vec<NodeId> = terminals.iter().map(|t| t.node).chain([source]).collect();
    locations.sort_unstable();
    locations.dedup();
    let trees: HashMap<NodeId, ShortestPathTree<S>> = locations.par_iter().map(|&v| (v, inst.graph().shortest_paths_from(v))).collect();
    let dist = |a: NodeId, b: NodeId| trees[&b].distance(a).cloned().ok_or(Error::Disconnected(a, b));

    // `followers[v]` lists the terminals that count v as an ancestor or peer.
    let mut followers: Vec<Vec<usize>> = vec![Vec::new(); terminals.len()];
    let mut waiting_on: Vec<usize> = vec![0; terminals.len()];
    for (i, t) in terminals.iter().enumerate() {
        for a in &rel.anc[&t.id] {
            followers[index[a]].push(i);
        }
        for p in &rel.peer[&t.id] {
            if *p != t.id {
                followers[index[p]].push(i);
            }
        }
        waiting_on[i] = rel.anc[&t.id].len();
    }

    // Best attachment so far: (distance, target terminal or None for the source).
    let mut best: Vec<(S, Option<usize>)> = terminals.iter().map(|t| dist(t.node, source).map(|d| (d, None))).collect::<Result<_>>()?;
    let mut connected = vec![false; terminals.len()];
    let mut paths: Vec<Vec<NodeId>> = vec![Vec::new(); terminals.len()];
    let mut solution = RandSolution::new();

    for _ in 0..terminals.len() {
        let pick = (0..terminals.len())
            .filter(|&i| !connected[i] && waiting_on[i] == 0)
            .min_by(|&a, &b| best[a].0.total_cmp(&best[b].0).then(a.cmp(&b)))
            .ok_or_else(|| Error::Internal("no eligible terminal left".into()))?;
        let from = terminals[pick].node;
        let path = match best[pick].1 {
            None => trees[&source].path_to_source(from).expect("reachable"),
            Some(target) => {
                let head = trees[&terminals[target].node].path_to_source(from).expect("reachable");
                erase_loops(head.into_iter().chain(paths[target].iter().skip(1).copied()))
            }
        };
        connected[pick] = true;
        solution.insert(terminals[pick].id, path.clone());
        paths[pick] = path;
        for &f in &followers[pick] {
            if connected[f] {
                continue;
            }
            if rel.anc[&terminals[f].id].contains(&terminals[pick].id) {
                waiting_on[f] -= 1;
            }
            let d = dist(terminals[f].node, from)?;
            if d < best[f].0 {
                best[f] = (d, Some(pick));
            }
        }
    }
    Ok(solution)
}

#[derive(Debug, Clone, Serialize)]
pub struct RandStats<S> {
    /// Demand-tree node count of the raw instance.
    pub p_raw: usize,
    /// Demand-tree node count after preprocessing.
    pub p_preprocessed: usize,
    pub tree_depth: usize,
    pub collections: usize,
    /// Per chain collection, the summed `w(X) * cost(S(X))` of its nodes
    /// (per-node variant only).
    pub collection_costs: Vec<S>,
    /// Cost of the same paths under the preprocessed demands.
    pub preprocessed_cost: S,
    pub bound_factor: u64,
}

#[derive(Debug, Clone)]
pub struct RandOutcome<S> {
    pub solution: RandSolution,
    /// Cost on the raw instance.
    pub cost: S,
    pub stats: RandStats<S>,
}

/// Preprocesses `raw`, runs the chosen variant and prices the paths on the
/// raw instance.
pub fn solve_rand_end_to_end<S: Scalar>(raw: &RandInstance<S>, config: &RandConfig) -> Result<RandOutcome<S>> {
    let p_raw = DemandTree::build(raw).len();
    let pre = preprocess(raw);
    let tree = DemandTree::build(&pre);
    let collections = decompose_chains(&tree);
    let (solution, collection_costs) = match config.variant {
        Variant::PerNodeSteiner => {
            let run = solve_rand_detailed(&pre, config.steiner)?;
            let by_node: HashMap<usize, S> = run.node_trees.iter().map(|nt| (nt.node, nt.weighted_cost())).collect();
            let costs =
                collections.iter().map(|c| c.nodes().filter_map(|x| by_node.get(&x)).fold(S::zero(), |acc, v| acc + v.clone())).collect();
            (run.solution, costs)
        }
        Variant::Prim => (solve_rand_prim(&pre)?, Vec::new()),
    };
    let cost = eval_rand_cost(&solution, raw)?;
    let preprocessed_cost = eval_rand_cost(&solution, &pre)?;
    let stats = RandStats {
        p_raw,
        p_preprocessed: tree.len(),
        tree_depth: tree.depth(),
        collections: collections.len(),
        collection_costs,
        preprocessed_cost,
        bound_factor: ratio_bound(config, p_raw),
    };
    Ok(RandOutcome { solution, cost, stats })
}
