//! Instances, solutions and exact cost evaluation for both problems.

mod graph;
mod instance;
mod packets;
mod solution;

pub use graph::{shortest_path_metric, Edge, Metric, NodeId, ShortestPathTree, WeightedGraph};
pub use instance::{Facility, FacilityId, Normalized, RaflInstance, RandInstance, Terminal, TerminalId};
pub use packets::{PacketId, PacketSet, PacketUniverse};
pub use solution::{edge_loads, eval_rafl_cost, eval_rand_cost, facility_loads, Assignment, RaflCost, RandSolution};
