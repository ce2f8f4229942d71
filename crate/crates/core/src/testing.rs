//! Small builders for unit tests.

use crate::model::*;
use crate::Rational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn qr(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn set(ids: &[u32]) -> PacketSet {
    ids.iter().map(|&p| PacketId(p)).collect()
}

pub fn universe(weights: &[u64]) -> PacketUniverse {
    PacketUniverse::new(weights.iter().enumerate().map(|(i, &w)| (PacketId(i as u32), w))).unwrap()
}

pub fn graph(n: usize, edges: &[(usize, usize, i64)]) -> WeightedGraph<Rational> {
    WeightedGraph::new(n, edges.iter().map(|&(u, v, c)| (u, v, q(c)))).unwrap()
}

pub fn terminal(id: u32, node: NodeId, demand: &[u32]) -> Terminal {
    Terminal { id: TerminalId(id), node, demand: set(demand) }
}

pub fn rand_instance(
    n: usize,
    edges: &[(usize, usize, i64)],
    source: NodeId,
    weights: &[u64],
    terminals: Vec<Terminal>,
) -> RandInstance<Rational> {
    RandInstance::new(graph(n, edges), source, universe(weights), terminals).unwrap()
}

pub fn facility(id: u32, node: NodeId, lambda: Rational) -> Facility<Rational> {
    Facility { id: FacilityId(id), node, lambda }
}
