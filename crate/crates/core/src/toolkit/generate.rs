//! Seeded random instances with laminar demands.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::format::{Instance, Problem};
use crate::error::{Error, Result};
use crate::model::{
    Facility, FacilityId, PacketId, PacketSet, PacketUniverse, RaflInstance, RandInstance, Terminal, TerminalId, WeightedGraph,
};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub nodes: usize,
    /// Probability of each extra edge on top of a random spanning tree.
    pub density: f64,
    pub terminals: usize,
    pub packets: usize,
    /// Maximum number of children when a packet set is split; 1 yields a chain.
    pub branching: usize,
    /// Inclusive ranges.
    pub weight: (u64, u64),
    pub cost: (u64, u64),
    pub lambda: (u64, u64),
    pub facilities: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            nodes: 8,
            density: 0.3,
            terminals: 4,
            packets: 4,
            branching: 2,
            weight: (1, 4),
            cost: (1, 10),
            lambda: (1, 8),
            facilities: 3,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInstance(format!("generator: {m}")));
        if self.nodes == 0 || self.terminals == 0 || self.packets == 0 || self.branching == 0 || self.facilities == 0 {
            return bad("all counts must be positive");
        }
        if !(0.0..=1.0).contains(&self.density) {
            return bad("density must lie in [0, 1]");
        }
        for (name, (lo, hi)) in [("weight", self.weight), ("cost", self.cost), ("lambda", self.lambda)] {
            if lo > hi {
                return bad(&format!("empty {name} range"));
            }
        }
        if self.weight.0 == 0 || self.lambda.0 == 0 {
            return bad("weights and lambdas must be positive");
        }
        if u32::try_from(self.packets).is_err() || u32::try_from(self.terminals).is_err() || u32::try_from(self.facilities).is_err() {
            return bad("counts too large");
        }
        Ok(())
    }
}

fn split(set: Vec<PacketId>, branching: usize, rng: &mut ChaCha8Rng, out: &mut Vec<PacketSet>) {
    out.push(set.iter().copied().collect());
    if set.len() <= 1 {
        return;
    }
    let mut set = set;
    set.shuffle(rng);
    let k = rng.random_range(1..=branching.min(set.len()));
    if k == 1 {
        let keep = rng.random_range(1..set.len());
        set.truncate(keep);
        split(set, branching, rng, out);
        return;
    }
    let used = rng.random_range(k..=set.len());
    set.truncate(used);
    let mut cuts: Vec<usize> = (1..used).collect();
    cuts.shuffle(rng);
    cuts.truncate(k - 1);
    cuts.sort_unstable();
    let mut start = 0;
    for end in cuts.into_iter().chain([used]) {
        split(set[start..end].to_vec(), branching, rng, out);
        start = end;
    }
}

/// Laminar family over packets `0..packets` built by recursive splitting; the
/// first set is the whole universe.
pub fn laminar_family(packets: usize, branching: usize, rng: &mut ChaCha8Rng) -> Vec<PacketSet> {
    let mut out = Vec::new();
    split((0..packets as u32).map(PacketId).collect(), branching.max(1), rng, &mut out);
    out
}

struct Parts {
    graph: WeightedGraph<Rational>,
    universe: PacketUniverse,
    terminals: Vec<Terminal>,
    rng: ChaCha8Rng,
}

fn common(cfg: &GeneratorConfig) -> Result<Parts> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.nodes;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut adjacent = vec![false; n * n];
    let mut edges = Vec::new();
    let cost = |rng: &mut ChaCha8Rng| Rational::from_integer(rng.random_range(cfg.cost.0..=cfg.cost.1).into());
    for i in 1..n {
        let (u, v) = (order[i], order[rng.random_range(0..i)]);
        adjacent[u * n + v] = true;
        adjacent[v * n + u] = true;
        edges.push((u.min(v), u.max(v), cost(&mut rng)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !adjacent[u * n + v] && rng.random_bool(cfg.density) {
                edges.push((u, v, cost(&mut rng)));
            }
        }
    }
    edges.sort_by_key(|&(u, v, _)| (u, v));
    let graph = WeightedGraph::new(n, edges)?;
    let universe = PacketUniverse::new((0..cfg.packets as u32).map(|p| (PacketId(p), rng.random_range(cfg.weight.0..=cfg.weight.1))))?;
    let family = laminar_family(cfg.packets, cfg.branching, &mut rng);
    let terminals = (0..cfg.terminals as u32)
        .map(|id| Terminal { id: TerminalId(id), node: rng.random_range(0..n), demand: family[rng.random_range(0..family.len())].clone() })
        .collect();
    Ok(Parts { graph, universe, terminals, rng })
}

/// RAND instance with source node 0.
pub fn generate_rand(cfg: &GeneratorConfig) -> Result<RandInstance<Rational>> {
    let parts = common(cfg)?;
    RandInstance::new(parts.graph, 0, parts.universe, parts.terminals)
}

pub fn generate_rafl(cfg: &GeneratorConfig) -> Result<RaflInstance<Rational>> {
    let mut parts = common(cfg)?;
    let rng = &mut parts.rng;
    let facilities = (0..cfg.facilities as u32)
        .map(|id| Facility {
            id: FacilityId(id),
            node: rng.random_range(0..cfg.nodes),
            lambda: Rational::from_integer(rng.random_range(cfg.lambda.0..=cfg.lambda.1).into()),
        })
        .collect();
    RaflInstance::new(parts.graph, parts.universe, parts.terminals, facilities)
}

pub fn generate(cfg: &GeneratorConfig, problem: Problem) -> Result<Instance<Rational>> {
    Ok(match problem {
        Problem::Rand => Instance::Rand(generate_rand(cfg)?),
        Problem::Rafl => Instance::Rafl(generate_rafl(cfg)?),
    })
}
