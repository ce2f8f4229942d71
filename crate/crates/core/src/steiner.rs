//! Steiner trees over a required node set.
//!
//! [`approx_steiner`] is the metric-closure MST heuristic (factor 2);
//! [`exact_steiner`] enumerates Steiner node subsets and is meant for graphs of
//! a dozen nodes.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::model::{NodeId, ShortestPathTree, WeightedGraph};
use crate::scalar::Scalar;

/// Default node cap for [`exact_steiner`].
pub const DEFAULT_EXACT_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct SteinerTree<S> {
    /// Edge ids, ascending.
    pub edges: Vec<usize>,
    pub cost: S,
}

impl<S: Scalar> SteinerTree<S> {
    fn from_edges(g: &WeightedGraph<S>, mut edges: Vec<usize>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let cost = g.cost_of(&edges);
        Self { edges, cost }
    }

    pub fn empty() -> Self {
        Self { edges: Vec::new(), cost: S::zero() }
    }

    pub fn nodes(&self, g: &WeightedGraph<S>) -> BTreeSet<NodeId> {
        self.edges.iter().flat_map(|&e| [g.edge(e).u, g.edge(e).v]).collect()
    }

    /// Parent links of the tree hung from `root`; nodes outside the tree are absent.
    pub fn rooted_at(&self, g: &WeightedGraph<S>, root: NodeId) -> HashMap<NodeId, NodeId> {
        let mut adj: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        for &e in &self.edges {
            let edge = g.edge(e);
            adj.entry(edge.u).or_default().push(edge.v);
            adj.entry(edge.v).or_default().push(edge.u);
        }
        let mut parent = HashMap::new();
        let mut stack = vec![root];
        let mut seen: BTreeSet<NodeId> = [root].into();
        while let Some(u) = stack.pop() {
            for &v in adj.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(v) {
                    parent.insert(v, u);
                    stack.push(v);
                }
            }
        }
        parent
    }

    /// The unique tree path from `from` to `root`, as a node sequence.
    pub fn path_to_root(&self, g: &WeightedGraph<S>, root: NodeId, from: NodeId) -> Option<Vec<NodeId>> {
        let parent = self.rooted_at(g, root);
        walk_up(&parent, root, from)
    }
}

pub(crate) fn walk_up(parent: &HashMap<NodeId, NodeId>, root: NodeId, from: NodeId) -> Option<Vec<NodeId>> {
    let mut path = vec![from];
    let mut cur = from;
    while cur != root {
        cur = *parent.get(&cur)?;
        path.push(cur);
    }
    Some(path)
}

fn required_set(g: &WeightedGraph<impl Scalar>, required: &[NodeId]) -> Result<Vec<NodeId>> {
    let mut req = required.to_vec();
    req.sort_unstable();
    req.dedup();
    if let Some(&bad) = req.iter().find(|&&v| v >= g.node_count()) {
        return Err(Error::InvalidInstance(format!("required node {bad} is outside the graph")));
    }
    Ok(req)
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Kruskal over the listed graph edges; ties go to the smaller edge id.
fn spanning_forest<S: Scalar>(g: &WeightedGraph<S>, mut candidates: Vec<usize>) -> Vec<usize> {
    candidates.sort_by(|&a, &b| g.edge(a).cost.total_cmp(&g.edge(b).cost).then(a.cmp(&b)));
    let mut dsu = DisjointSets::new(g.node_count());
    candidates.into_iter().filter(|&e| dsu.union(g.edge(e).u, g.edge(e).v)).collect()
}

/// Repeatedly strips leaves that are not required.
fn prune_leaves<S: Scalar>(g: &WeightedGraph<S>, edges: Vec<usize>, required: &[NodeId]) -> Vec<usize> {
    let required: BTreeSet<NodeId> = required.iter().copied().collect();
    let mut alive: BTreeSet<usize> = edges.into_iter().collect();
    loop {
        let mut degree: HashMap<NodeId, usize> = HashMap::new();
        for &e in &alive {
            *degree.entry(g.edge(e).u).or_default() += 1;
            *degree.entry(g.edge(e).v).or_default() += 1;
        }
        let doomed: Vec<usize> = alive
            .iter()
            .copied()
            .filter(|&e| {
                let edge = g.edge(e);
                [edge.u, edge.v].iter().any(|v| degree[v] == 1 && !required.contains(v))
            })
            .collect();
        if doomed.is_empty() {
            return alive.into_iter().collect();
        }
        for e in doomed {
            alive.remove(&e);
        }
    }
}

/// Metric-closure MST: build the complete graph on `required` under
/// shortest-path distances, take its MST, expand each closure edge back into a
/// shortest path, re-span the union to drop cycles and prune non-required
/// leaves. The result costs at most twice the optimum.
pub fn approx_steiner<S: Scalar>(g: &WeightedGraph<S>, required: &[NodeId]) -> Result<SteinerTree<S>> {
    let req = required_set(g, required)?;
    if req.len() <= 1 {
        return Ok(SteinerTree::empty());
    }
    let trees: Vec<ShortestPathTree<S>> = req.iter().map(|&r| g.shortest_paths_from(r)).collect();
    let mut closure = Vec::new();
    for i in 0..req.len() {
        for j in (i + 1)..req.len() {
            let d = trees[i].distance(req[j]).ok_or(Error::Disconnected(req[i], req[j]))?;
            closure.push((d.clone(), i, j));
        }
    }
    closure.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut dsu = DisjointSets::new(req.len());
    let mut expanded = BTreeSet::new();
    for (_, i, j) in closure {
        if !dsu.union(i, j) {
            continue;
        }
        let path = trees[i].path_to_source(req[j]).expect("reachable");
        for w in path.windows(2) {
            expanded.insert(g.edge_between(w[0], w[1]).expect("path edge"));
        }
    }
    let tree = spanning_forest(g, expanded.into_iter().collect());
    Ok(SteinerTree::from_edges(g, prune_leaves(g, tree, &req)))
}

/// Exact minimum Steiner tree by enumerating which optional nodes to include
/// and spanning each induced subgraph. Refuses graphs above `cap` nodes.
pub fn exact_steiner<S: Scalar>(g: &WeightedGraph<S>, required: &[NodeId], cap: usize) -> Result<SteinerTree<S>> {
    if g.node_count() > cap {
        return Err(Error::CapExceeded { what: "exact Steiner tree", size: g.node_count() as u128, cap: cap as u128 });
    }
    let req = required_set(g, required)?;
    if req.len() <= 1 {
        return Ok(SteinerTree::empty());
    }
    let optional: Vec<NodeId> = (0..g.node_count()).filter(|v| req.binary_search(v).is_err()).collect();
    let mut best: Option<SteinerTree<S>> = None;
    let mut inside = vec![false; g.node_count()];
    for mask in 0u64..(1u64 << optional.len()) {
        inside.iter_mut().for_each(|b| *b = false);
        for &r in &req {
            inside[r] = true;
        }
        let mut count = req.len();
        for (bit, &v) in optional.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                inside[v] = true;
                count += 1;
            }
        }
        let induced: Vec<usize> = (0..g.edge_count()).filter(|&e| inside[g.edge(e).u] && inside[g.edge(e).v]).collect();
        let forest = spanning_forest(g, induced);
        if forest.len() + 1 != count {
            continue;
        }
        let cost = g.cost_of(&forest);
        if best.as_ref().is_none_or(|b| cost < b.cost) {
            best = Some(SteinerTree { edges: forest, cost });
        }
    }
    let best = best.ok_or_else(|| Error::Disconnected(req[0], req[req.len() - 1]))?;
    Ok(SteinerTree::from_edges(g, prune_leaves(g, best.edges, &req)))
}

/// Which Steiner routine a solver calls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub enum SteinerMethod {
    #[default]
    MstApprox,
    Exact {
        cap: usize,
    },
}

impl SteinerMethod {
    pub fn solve<S: Scalar>(&self, g: &WeightedGraph<S>, required: &[NodeId]) -> Result<SteinerTree<S>> {
        match *self {
            Self::MstApprox => approx_steiner(g, required),
            Self::Exact { cap } => exact_steiner(g, required, cap),
        }
    }

    /// Approximation factor of the routine.
    pub fn alpha(&self) -> u32 {
        match self {
            Self::MstApprox => 2,
            Self::Exact { .. } => 1,
        }
    }
}
