use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::graph::{shortest_path_metric, NodeId, WeightedGraph};
use super::packets::{PacketSet, PacketUniverse};
use crate::error::{Error, Result};
use crate::laminar::validate_laminar;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TerminalId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FacilityId(pub u32);

impl fmt::Display for TerminalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for FacilityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Terminal {
    pub id: TerminalId,
    pub node: NodeId,
    pub demand: PacketSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Facility<S> {
    pub id: FacilityId,
    pub node: NodeId,
    /// Opening multiplier: the facility pays `lambda` per unit of packet weight it produces.
    pub lambda: S,
}

fn check_terminals(universe: &PacketUniverse, terminals: &mut [Terminal], node_count: usize) -> Result<()> {
    terminals.sort_by_key(|t| t.id);
    for pair in terminals.windows(2) {
        if pair[0].id == pair[1].id {
            return Err(Error::InvalidInstance(format!("duplicate terminal id {}", pair[0].id)));
        }
    }
    if terminals.is_empty() {
        return Err(Error::InvalidInstance("instance has no terminals".into()));
    }
    for t in terminals.iter() {
        if t.node >= node_count {
            return Err(Error::InvalidInstance(format!("terminal {} sits at unknown node {}", t.id, t.node)));
        }
        if t.demand.is_empty() {
            return Err(Error::InvalidInstance(format!("terminal {} has an empty demand", t.id)));
        }
        if let Some(p) = t.demand.iter().find(|p| !universe.contains(**p)) {
            return Err(Error::InvalidInstance(format!("terminal {} demands unknown packet {p}", t.id)));
        }
    }
    let demands: Vec<&PacketSet> = terminals.iter().map(|t| &t.demand).collect();
    if let Err(v) = validate_laminar(demands) {
        return Err(Error::NotLaminar { first: terminals[v.first].id.0, second: terminals[v.second].id.0 });
    }
    Ok(())
}

/// A single-source network design instance `(G, T, D)` with laminar demands.
#[derive(Debug, Clone, PartialEq)]
pub struct RandInstance<S> {
    graph: WeightedGraph<S>,
    source: NodeId,
    universe: PacketUniverse,
    terminals: Vec<Terminal>,
}

impl<S: Scalar> RandInstance<S> {
    pub fn new(graph: WeightedGraph<S>, source: NodeId, universe: PacketUniverse, mut terminals: Vec<Terminal>) -> Result<Self> {
        if source >= graph.node_count() {
            return Err(Error::InvalidInstance(format!("source {source} is outside the graph")));
        }
        check_terminals(&universe, &mut terminals, graph.node_count())?;
        let tree = graph.shortest_paths_from(source);
        if let Some(t) = terminals.iter().find(|t| !tree.reachable(t.node)) {
            return Err(Error::Disconnected(t.node, source));
        }
        Ok(Self { graph, source, universe, terminals })
    }

    pub fn graph(&self) -> &WeightedGraph<S> {
        &self.graph
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn universe(&self) -> &PacketUniverse {
        &self.universe
    }

    /// Terminals sorted by id.
    pub fn terminals(&self) -> &[Terminal] {
        &self.terminals
    }

    pub fn terminal(&self, id: TerminalId) -> Option<&Terminal> {
        self.terminals.binary_search_by_key(&id, |t| t.id).ok().map(|i| &self.terminals[i])
    }

    pub fn demand_weight(&self, t: &Terminal) -> u64 {
        self.universe.total_weight(&t.demand)
    }

    /// Same network and terminals with some demands replaced.
    pub fn with_demands(&self, demands: &BTreeMap<TerminalId, PacketSet>) -> Result<Self> {
        let terminals = self
            .terminals
            .iter()
            .map(|t| Terminal { demand: demands.get(&t.id).cloned().unwrap_or_else(|| t.demand.clone()), ..t.clone() })
            .collect();
        Self::new(self.graph.clone(), self.source, self.universe.clone(), terminals)
    }

    /// Same network with a different packet universe and demands.
    pub fn with_packets(&self, universe: PacketUniverse, demands: &BTreeMap<TerminalId, PacketSet>) -> Result<Self> {
        let terminals = self
            .terminals
            .iter()
            .map(|t| Terminal { demand: demands.get(&t.id).cloned().unwrap_or_else(|| t.demand.clone()), ..t.clone() })
            .collect();
        Self::new(self.graph.clone(), self.source, universe, terminals)
    }

    /// Keeps only the listed terminals.
    pub fn restricted_to(&self, keep: &HashSet<TerminalId>) -> Result<Self> {
        let terminals = self.terminals.iter().filter(|t| keep.contains(&t.id)).cloned().collect();
        Self::new(self.graph.clone(), self.source, self.universe.clone(), terminals)
    }
}

/// A facility location instance with laminar demands.
#[derive(Debug, Clone, PartialEq)]
pub struct RaflInstance<S> {
    graph: WeightedGraph<S>,
    universe: PacketUniverse,
    terminals: Vec<Terminal>,
    facilities: Vec<Facility<S>>,
    /// `c(t, f)` indexed by terminal position then facility position.
    distances: Vec<Vec<S>>,
}

impl<S: Scalar> RaflInstance<S> {
    pub fn new(
        graph: WeightedGraph<S>,
        universe: PacketUniverse,
        mut terminals: Vec<Terminal>,
        mut facilities: Vec<Facility<S>>,
    ) -> Result<Self> {
        check_terminals(&universe, &mut terminals, graph.node_count())?;
        facilities.sort_by_key(|f| f.id);
        if facilities.is_empty() {
            return Err(Error::InvalidInstance("instance has no facilities".into()));
        }
        for pair in facilities.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::InvalidInstance(format!("duplicate facility id {}", pair[0].id)));
            }
        }
        for f in &facilities {
            if f.node >= graph.node_count() {
                return Err(Error::InvalidInstance(format!("facility {} sits at unknown node {}", f.id, f.node)));
            }
            if !f.lambda.is_positive() {
                return Err(Error::InvalidInstance(format!("facility {} has non-positive multiplier {}", f.id, f.lambda)));
            }
        }
        let nodes: Vec<NodeId> = terminals.iter().map(|t| t.node).chain(facilities.iter().map(|f| f.node)).collect();
        let metric = shortest_path_metric(&graph, &nodes)?;
        let distances = terminals.iter().map(|t| facilities.iter().map(|f| metric.distance(t.node, f.node).clone()).collect()).collect();
        Ok(Self { graph, universe, terminals, facilities, distances })
    }

    pub fn graph(&self) -> &WeightedGraph<S> {
        &self.graph
    }

    pub fn universe(&self) -> &PacketUniverse {
        &self.universe
    }

    pub fn terminals(&self) -> &[Terminal] {
        &self.terminals
    }

    pub fn facilities(&self) -> &[Facility<S>] {
        &self.facilities
    }

    pub fn terminal_index(&self, id: TerminalId) -> Option<usize> {
        self.terminals.binary_search_by_key(&id, |t| t.id).ok()
    }

    pub fn facility_index(&self, id: FacilityId) -> Option<usize> {
        self.facilities.binary_search_by_key(&id, |f| f.id).ok()
    }

    /// `c(t, f)` by positions.
    pub fn distance(&self, terminal: usize, facility: usize) -> &S {
        &self.distances[terminal][facility]
    }

    pub fn demand_weight(&self, terminal: usize) -> u64 {
        self.universe.total_weight(&self.terminals[terminal].demand)
    }

    pub fn min_lambda(&self) -> S {
        self.facilities.iter().map(|f| f.lambda.clone()).reduce(S::min_of).expect("at least one facility")
    }

    /// Rescales the instance so that the cheapest facility has multiplier 1.
    ///
    /// Edge costs are divided by the same factor, so every solution's cost is
    /// divided by `scale` and optimal solutions are unchanged.
    pub fn normalized(&self) -> Normalized<S> {
        let scale = self.min_lambda();
        let inv = S::one() / scale.clone();
        let facilities = self.facilities.iter().map(|f| Facility { lambda: f.lambda.clone() * inv.clone(), ..f.clone() }).collect();
        let distances = self.distances.iter().map(|row| row.iter().map(|d| d.clone() * inv.clone()).collect()).collect();
        let instance = Self {
            graph: self.graph.scaled(&inv),
            universe: self.universe.clone(),
            terminals: self.terminals.clone(),
            facilities,
            distances,
        };
        Normalized { instance, scale }
    }
}

/// An instance rescaled to `min lambda = 1`; multiply its costs by `scale` to
/// get back to the original units.
#[derive(Debug, Clone)]
pub struct Normalized<S> {
    pub instance: RaflInstance<S>,
    pub scale: S,
}
