//! Laminar demand families: validation, the demand tree, the weight-halving
//! preprocessing and the heavy-path chain decomposition.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::model::{PacketId, PacketSet, PacketUniverse, RandInstance, Terminal, TerminalId};
use crate::scalar::Scalar;

/// Positions of two demand sets that neither nest nor are disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaminarViolation {
    pub first: usize,
    pub second: usize,
}

fn disjoint(a: &PacketSet, b: &PacketSet) -> bool {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().all(|p| !large.contains(p))
}

/// Accepts iff every pair of sets is disjoint or nested.
pub fn validate_laminar<'a>(demands: impl IntoIterator<Item = &'a PacketSet>) -> Result<(), LaminarViolation> {
    let sets: Vec<&PacketSet> = demands.into_iter().collect();
    for i in 0..sets.len() {
        for j in (i + 1)..sets.len() {
            let (a, b) = (sets[i], sets[j]);
            if !(disjoint(a, b) || a.is_subset(b) || b.is_subset(a)) {
                return Err(LaminarViolation { first: i, second: j });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub set: PacketSet,
    pub weight: u64,
    pub parent: Option<usize>,
    /// Ascending node ids.
    pub children: Vec<usize>,
    /// Terminals whose demand equals `set`, ascending.
    pub terminals: Vec<TerminalId>,
}

/// Containment tree over the distinct demand sets, rooted at the universe.
///
/// Node 0 is the root. The remaining nodes are numbered by decreasing set size
/// (ties broken by set order), so every parent has a smaller id than its
/// children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandTree {
    nodes: Vec<TreeNode>,
    node_of: BTreeMap<TerminalId, usize>,
}

impl DemandTree {
    /// Builds the tree; demands must already be laminar.
    pub fn build<S: Scalar>(inst: &RandInstance<S>) -> Self {
        Self::from_demands(inst.universe(), inst.terminals())
    }

    pub fn from_demands(universe: &PacketUniverse, terminals: &[Terminal]) -> Self {
        let root_set = universe.all();
        let mut by_set: BTreeMap<&PacketSet, Vec<TerminalId>> = BTreeMap::new();
        let mut root_terminals = Vec::new();
        for t in terminals {
            if t.demand == root_set {
                root_terminals.push(t.id);
            } else {
                by_set.entry(&t.demand).or_default().push(t.id);
            }
        }
        let mut sets: Vec<(&PacketSet, Vec<TerminalId>)> = by_set.into_iter().collect();
        sets.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(b.0)));

        let mut nodes = vec![TreeNode {
            weight: universe.universe_weight(),
            set: root_set,
            parent: None,
            children: Vec::new(),
            terminals: root_terminals,
        }];
        for (set, mut ts) in sets {
            ts.sort();
            // Minimal strict superset: the earlier node with the smallest set containing this one.
            let parent = (1..nodes.len()).rev().find(|&j| nodes[j].set.len() > set.len() && set.is_subset(&nodes[j].set)).unwrap_or(0);
            let id = nodes.len();
            nodes[parent].children.push(id);
            nodes.push(TreeNode {
                weight: universe.total_weight(set),
                set: set.clone(),
                parent: Some(parent),
                children: Vec::new(),
                terminals: ts,
            });
        }
        let node_of = nodes.iter().enumerate().flat_map(|(i, n)| n.terminals.iter().map(move |&t| (t, i))).collect();
        Self { nodes, node_of }
    }

    pub const ROOT: usize = 0;

    /// Number of nodes, including the root.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    /// The node holding a terminal.
    pub fn node_of(&self, terminal: TerminalId) -> Option<usize> {
        self.node_of.get(&terminal).copied()
    }

    /// Depth-first preorder, children in ascending id.
    pub fn preorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![Self::ROOT];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(self.nodes[v].children.iter().rev());
        }
        order
    }

    /// Edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        for v in self.preorder() {
            if let Some(p) = self.nodes[v].parent {
                depth[v] = depth[p] + 1;
            }
        }
        depth.into_iter().max().unwrap_or(0)
    }

    /// Node count of every subtree.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![1usize; self.nodes.len()];
        for v in self.preorder().into_iter().rev() {
            if let Some(p) = self.nodes[v].parent {
                size[p] += size[v];
            }
        }
        size
    }

    /// First parent/child pair violating `w(parent) >= 2 w(child)`, as weights.
    pub fn halving_violation(&self) -> Option<(u64, u64)> {
        self.nodes.iter().find_map(|n| {
            let p = &self.nodes[n.parent?];
            (p.weight < 2 * n.weight).then_some((p.weight, n.weight))
        })
    }
}

/// Result of merging packets demanded by exactly the same terminals.
#[derive(Debug, Clone)]
pub struct CanonicalPackets<S> {
    pub instance: RandInstance<S>,
    /// Representative packet (smallest id of its class) to the merged class.
    pub classes: BTreeMap<PacketId, Vec<PacketId>>,
}

/// Merges every group of packets demanded by the same terminal set into one
/// packet carrying the group's total weight. Costs of all solutions and the
/// demand tree shape are unchanged; only the packet count shrinks.
pub fn canonicalize_packets<S: Scalar>(inst: &RandInstance<S>) -> CanonicalPackets<S> {
    let mut signature: BTreeMap<PacketId, Vec<TerminalId>> = inst.universe().ids().map(|p| (p, Vec::new())).collect();
    for t in inst.terminals() {
        for p in &t.demand {
            signature.get_mut(p).expect("demand within universe").push(t.id);
        }
    }
    let mut classes_by_sig: BTreeMap<Vec<TerminalId>, Vec<PacketId>> = BTreeMap::new();
    for (p, sig) in signature {
        classes_by_sig.entry(sig).or_default().push(p);
    }
    let mut rep_of = BTreeMap::new();
    let mut classes = BTreeMap::new();
    for members in classes_by_sig.into_values() {
        let rep = members[0];
        for &m in &members {
            rep_of.insert(m, rep);
        }
        classes.insert(rep, members);
    }
    let universe = PacketUniverse::new(classes.iter().map(|(&rep, members): (&PacketId, &Vec<PacketId>)| {
        (rep, members.iter().map(|&m| inst.universe().weight(m).expect("known packet")).sum())
    }))
    .expect("merged universe is valid");
    let demands = inst.terminals().iter().map(|t| (t.id, t.demand.iter().map(|p| rep_of[p]).collect())).collect();
    let instance = inst.with_packets(universe, &demands).expect("merging packets preserves validity");
    CanonicalPackets { instance, classes }
}

/// Number of nodes of the demand tree, `P` in the approximation bounds.
pub fn effective_packet_count<S: Scalar>(inst: &RandInstance<S>) -> usize {
    DemandTree::build(inst).len()
}

/// Raises demands so that every surviving child weighs at most half its parent.
///
/// Nodes are visited in depth-first preorder; a node heavier than half of its
/// current parent is merged into that parent and its terminals take over the
/// parent's demand set. Each terminal's demand changes at most once and at most
/// doubles in weight.
pub fn preprocess<S: Scalar>(inst: &RandInstance<S>) -> RandInstance<S> {
    let tree = DemandTree::build(inst);
    let mut parent: Vec<Option<usize>> = tree.nodes().iter().map(|n| n.parent).collect();
    let mut demands: BTreeMap<TerminalId, PacketSet> = BTreeMap::new();
    for x in tree.preorder() {
        let Some(y) = parent[x] else { continue };
        // y was visited earlier and survived, so it never merges afterwards.
        let (nx, ny) = (tree.node(x), tree.node(y));
        if 2 * nx.weight > ny.weight {
            for &t in &nx.terminals {
                demands.insert(t, ny.set.clone());
            }
            for &c in &nx.children {
                parent[c] = Some(y);
            }
        }
    }
    inst.with_demands(&demands).expect("preprocessing preserves validity")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Chain {
    /// Tree nodes from the chain's start down to its end.
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct ChainCollection {
    pub chains: Vec<Chain>,
}

impl ChainCollection {
    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.chains.iter().flat_map(|c| c.nodes.iter().copied())
    }
}

/// Splits the tree into collections of packet-disjoint chains.
///
/// A heavy path (always stepping into the child with the largest subtree,
/// lowest id on ties) is peeled from the root; the components left behind are
/// decomposed recursively and collection `j` gathers every chain found at
/// recursion depth `j`. At most `floor(log2 P) + 1` collections result.
pub fn decompose_chains(tree: &DemandTree) -> Vec<ChainCollection> {
    let sizes = tree.subtree_sizes();
    let mut collections: Vec<ChainCollection> = Vec::new();
    let mut queue = VecDeque::from([(DemandTree::ROOT, 0usize)]);
    while let Some((start, depth)) = queue.pop_front() {
        let mut chain = Vec::new();
        let mut cur = Some(start);
        while let Some(v) = cur {
            chain.push(v);
            let heavy = tree.node(v).children.iter().copied().max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then_with(|| b.cmp(&a)));
            for &c in &tree.node(v).children {
                if Some(c) != heavy {
                    queue.push_back((c, depth + 1));
                }
            }
            cur = heavy;
        }
        if collections.len() <= depth {
            collections.resize_with(depth + 1, ChainCollection::default);
        }
        collections[depth].chains.push(Chain { nodes: chain });
    }
    collections
}
