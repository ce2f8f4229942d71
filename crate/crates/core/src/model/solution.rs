use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use super::graph::NodeId;
use super::instance::{FacilityId, RaflInstance, RandInstance, TerminalId};
use super::packets::PacketSet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One path per terminal, stored as the node sequence from the terminal's
/// location to the source.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RandSolution {
    pub paths: BTreeMap<TerminalId, Vec<NodeId>>,
}

impl RandSolution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, terminal: TerminalId, path: Vec<NodeId>) {
        self.paths.insert(terminal, path);
    }

    pub fn path(&self, terminal: TerminalId) -> Option<&[NodeId]> {
        self.paths.get(&terminal).map(Vec::as_slice)
    }
}

/// Terminal to facility mapping.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    pub map: BTreeMap<TerminalId, FacilityId>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assign(&mut self, terminal: TerminalId, facility: FacilityId) {
        self.map.insert(terminal, facility);
    }

    pub fn get(&self, terminal: TerminalId) -> Option<FacilityId> {
        self.map.get(&terminal).copied()
    }
}

/// Edge ids along a validated path.
fn path_edges<S: Scalar>(inst: &RandInstance<S>, terminal: TerminalId, path: &[NodeId]) -> Result<Vec<usize>> {
    let t = inst.terminal(terminal).ok_or(Error::UnknownTerminal(terminal.0))?;
    let infeasible = |reason: String| Error::InfeasiblePath { terminal: terminal.0, reason };
    match (path.first(), path.last()) {
        (Some(&first), Some(&last)) => {
            if first != t.node {
                return Err(infeasible(format!("starts at node {first}, terminal sits at {}", t.node)));
            }
            if last != inst.source() {
                return Err(infeasible(format!("ends at node {last}, source is {}", inst.source())));
            }
        }
        _ => return Err(infeasible("empty path".into())),
    }
    let mut seen = HashSet::with_capacity(path.len());
    for &v in path {
        if !seen.insert(v) {
            return Err(infeasible(format!("revisits node {v}")));
        }
    }
    path.windows(2)
        .map(|w| inst.graph().edge_between(w[0], w[1]).ok_or_else(|| infeasible(format!("no edge between {} and {}", w[0], w[1]))))
        .collect()
}

/// Checks every terminal has a feasible path; returns the packet set `S(e)`
/// carried by each used edge.
pub fn edge_loads<S: Scalar>(sol: &RandSolution, inst: &RandInstance<S>) -> Result<BTreeMap<usize, PacketSet>> {
    if let Some(extra) = sol.paths.keys().find(|id| inst.terminal(**id).is_none()) {
        return Err(Error::UnknownTerminal(extra.0));
    }
    let mut loads: BTreeMap<usize, PacketSet> = BTreeMap::new();
    for t in inst.terminals() {
        let path = sol.paths.get(&t.id).ok_or(Error::MissingPath(t.id.0))?;
        for e in path_edges(inst, t.id, path)? {
            loads.entry(e).or_default().extend(t.demand.iter().copied());
        }
    }
    Ok(loads)
}

/// `sum_e c_e * w(S(e))`, each distinct packet paid once per edge.
pub fn eval_rand_cost<S: Scalar>(sol: &RandSolution, inst: &RandInstance<S>) -> Result<S> {
    let loads = edge_loads(sol, inst)?;
    Ok(loads
        .iter()
        .fold(S::zero(), |acc, (&e, set)| acc + inst.graph().edge(e).cost.clone() * S::from_weight(inst.universe().total_weight(set))))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RaflCost<S> {
    pub facility: S,
    pub routing: S,
}

impl<S: Scalar> RaflCost<S> {
    pub fn total(&self) -> S {
        self.facility.clone() + self.routing.clone()
    }
}

/// Packet set `S_A(f)` produced at each facility that serves someone.
pub fn facility_loads<S: Scalar>(a: &Assignment, inst: &RaflInstance<S>) -> Result<BTreeMap<FacilityId, PacketSet>> {
    if let Some(extra) = a.map.keys().find(|id| inst.terminal_index(**id).is_none()) {
        return Err(Error::UnknownTerminal(extra.0));
    }
    let mut loads: BTreeMap<FacilityId, PacketSet> = BTreeMap::new();
    for t in inst.terminals() {
        let f = a.get(t.id).ok_or(Error::Unassigned(t.id.0))?;
        inst.facility_index(f).ok_or(Error::UnknownFacility(f.0))?;
        loads.entry(f).or_default().extend(t.demand.iter().copied());
    }
    Ok(loads)
}

/// Facility opening cost and routing cost of an assignment.
pub fn eval_rafl_cost<S: Scalar>(a: &Assignment, inst: &RaflInstance<S>) -> Result<RaflCost<S>> {
    let loads = facility_loads(a, inst)?;
    let facility = loads.iter().fold(S::zero(), |acc, (f, set)| {
        let lambda = &inst.facilities()[inst.facility_index(*f).expect("checked")].lambda;
        acc + lambda.clone() * S::from_weight(inst.universe().total_weight(set))
    });
    let mut routing = S::zero();
    for (ti, t) in inst.terminals().iter().enumerate() {
        let fi = inst.facility_index(a.map[&t.id]).expect("checked");
        routing = routing + S::from_weight(inst.demand_weight(ti)) * inst.distance(ti, fi).clone();
    }
    Ok(RaflCost { facility, routing })
}
