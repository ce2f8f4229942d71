use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Edge<S> {
    pub u: NodeId,
    pub v: NodeId,
    pub cost: S,
}

impl<S> Edge<S> {
    pub fn other(&self, node: NodeId) -> NodeId {
        if node == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected simple graph with nonnegative edge costs. Edges keep their input
/// order, which doubles as their id.
#[derive(Debug, Clone)]
pub struct WeightedGraph<S> {
    node_count: usize,
    edges: Vec<Edge<S>>,
    adjacency: Vec<Vec<(NodeId, usize)>>,
    lookup: HashMap<(NodeId, NodeId), usize>,
}

impl<S: PartialEq> PartialEq for WeightedGraph<S> {
    fn eq(&self, other: &Self) -> bool {
        self.node_count == other.node_count && self.edges == other.edges
    }
}

impl<S: Scalar> WeightedGraph<S> {
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (NodeId, NodeId, S)>) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidInstance("graph has no nodes".into()));
        }
        let mut graph = Self { node_count, edges: Vec::new(), adjacency: vec![Vec::new(); node_count], lookup: HashMap::new() };
        for (u, v, cost) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::InvalidInstance(format!("edge ({u}, {v}) references a node outside 0..{node_count}")));
            }
            if u == v {
                return Err(Error::InvalidInstance(format!("self-loop at node {u}")));
            }
            if cost.is_negative() {
                return Err(Error::InvalidInstance(format!("edge ({u}, {v}) has negative cost {cost}")));
            }
            let key = (u.min(v), u.max(v));
            if graph.lookup.contains_key(&key) {
                return Err(Error::InvalidInstance(format!("parallel edge ({u}, {v})")));
            }
            let id = graph.edges.len();
            graph.lookup.insert(key, id);
            graph.adjacency[u].push((v, id));
            graph.adjacency[v].push((u, id));
            graph.edges.push(Edge { u, v, cost });
        }
        Ok(graph)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge<S> {
        &self.edges[id]
    }

    pub fn edge_between(&self, u: NodeId, v: NodeId) -> Option<usize> {
        self.lookup.get(&(u.min(v), u.max(v))).copied()
    }

    /// `(neighbor, edge id)` pairs.
    pub fn neighbors(&self, u: NodeId) -> &[(NodeId, usize)] {
        &self.adjacency[u]
    }

    /// Multiplies every edge cost by `factor`.
    pub fn scaled(&self, factor: &S) -> Self {
        let mut out = self.clone();
        for e in &mut out.edges {
            e.cost = e.cost.clone() * factor.clone();
        }
        out
    }

    pub fn shortest_paths_from(&self, source: NodeId) -> ShortestPathTree<S> {
        ShortestPathTree::compute(self, source)
    }

    /// Total cost of a set of edge ids.
    pub fn cost_of<'a>(&self, edge_ids: impl IntoIterator<Item = &'a usize>) -> S {
        edge_ids.into_iter().fold(S::zero(), |acc, &e| acc + self.edges[e].cost.clone())
    }
}

struct HeapEntry<S> {
    dist: S,
    node: NodeId,
}

impl<S: Scalar> PartialEq for HeapEntry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for HeapEntry<S> {}

impl<S: Scalar> PartialOrd for HeapEntry<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for HeapEntry<S> {
    // Reversed so BinaryHeap pops the closest node, lowest id first on ties.
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

/// Single-source Dijkstra result with predecessor links.
#[derive(Debug, Clone)]
pub struct ShortestPathTree<S> {
    source: NodeId,
    dist: Vec<Option<S>>,
    pred: Vec<Option<NodeId>>,
}

impl<S: Scalar> ShortestPathTree<S> {
    fn compute(g: &WeightedGraph<S>, source: NodeId) -> Self {
        let n = g.node_count();
        let mut dist: Vec<Option<S>> = vec![None; n];
        let mut pred = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[source] = Some(S::zero());
        heap.push(HeapEntry { dist: S::zero(), node: source });
        while let Some(HeapEntry { dist: d, node: u }) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for &(v, e) in g.neighbors(u) {
                if done[v] {
                    continue;
                }
                let cand = d.clone() + g.edge(e).cost.clone();
                let better = match &dist[v] {
                    None => true,
                    Some(old) => cand < *old || (cand == *old && pred[v].is_some_and(|p: NodeId| u < p)),
                };
                if better {
                    dist[v] = Some(cand.clone());
                    pred[v] = Some(u);
                    heap.push(HeapEntry { dist: cand, node: v });
                }
            }
        }
        Self { source, dist, pred }
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn distance(&self, node: NodeId) -> Option<&S> {
        self.dist[node].as_ref()
    }

    pub fn reachable(&self, node: NodeId) -> bool {
        self.dist[node].is_some()
    }

    /// Node sequence from `node` back to the tree's source (inclusive).
    pub fn path_to_source(&self, node: NodeId) -> Option<Vec<NodeId>> {
        self.dist[node].as_ref()?;
        let mut path = vec![node];
        let mut cur = node;
        while let Some(p) = self.pred[cur] {
            path.push(p);
            cur = p;
        }
        Some(path)
    }
}

/// Shortest-path distances `c(u, v)` between a set of required nodes.
#[derive(Debug, Clone)]
pub struct Metric<S> {
    nodes: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    dist: Vec<Vec<S>>,
}

impl<S: Scalar> Metric<S> {
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Panics if either node was not requested when the metric was built.
    pub fn distance(&self, u: NodeId, v: NodeId) -> &S {
        &self.dist[self.index[&u]][self.index[&v]]
    }

    pub fn get(&self, u: NodeId, v: NodeId) -> Option<&S> {
        Some(&self.dist[*self.index.get(&u)?][*self.index.get(&v)?])
    }
}

/// All-pairs shortest-path distances restricted to `nodes`.
pub fn shortest_path_metric<S: Scalar>(g: &WeightedGraph<S>, nodes: &[NodeId]) -> Result<Metric<S>> {
    let mut uniq: Vec<NodeId> = nodes.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    if let Some(&bad) = uniq.iter().find(|&&v| v >= g.node_count()) {
        return Err(Error::InvalidInstance(format!("node {bad} is outside the graph")));
    }
    let index: HashMap<NodeId, usize> = uniq.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut dist = Vec::with_capacity(uniq.len());
    for &u in &uniq {
        let tree = g.shortest_paths_from(u);
        let mut row = Vec::with_capacity(uniq.len());
        for &v in &uniq {
            match tree.distance(v) {
                Some(d) => row.push(d.clone()),
                None => return Err(Error::Disconnected(u, v)),
            }
        }
        dist.push(row);
    }
    Ok(Metric { nodes: uniq, index, dist })
}
