//! Brute-force reference computations shared by the integration tests. None
//! of these reuse library algorithms beyond instance accessors.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use redund::model::{Assignment, NodeId, PacketId, PacketSet, RaflInstance, RandInstance, RandSolution, WeightedGraph};
use redund::toolkit::GeneratorConfig;
use redund::{Rational, Scalar};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Pairwise check: any two sets are disjoint or nested.
pub fn is_laminar<'a>(sets: impl IntoIterator<Item = &'a PacketSet>) -> bool {
    let sets: Vec<&PacketSet> = sets.into_iter().collect();
    sets.iter().enumerate().all(|(i, a)| sets[i + 1..].iter().all(|b| a.is_disjoint(b) || a.is_subset(b) || b.is_subset(a)))
}

pub fn weight_of<S: Scalar>(inst: &RandInstance<S>, set: &PacketSet) -> u64 {
    set.iter().map(|p| inst.universe().weight(*p).unwrap()).sum()
}

/// Edge cost of a RAND solution, recomputed from node pairs.
pub fn rand_cost<S: Scalar>(inst: &RandInstance<S>, sol: &RandSolution) -> S {
    let mut loads: BTreeMap<(NodeId, NodeId), BTreeSet<PacketId>> = BTreeMap::new();
    for t in inst.terminals() {
        let path = &sol.paths[&t.id];
        for w in path.windows(2) {
            let key = (w[0].min(w[1]), w[0].max(w[1]));
            loads.entry(key).or_default().extend(t.demand.iter().copied());
        }
    }
    loads.iter().fold(S::zero(), |acc, ((u, v), set)| {
        let e = inst.graph().edges().iter().find(|e| (e.u == *u && e.v == *v) || (e.u == *v && e.v == *u)).expect("path edge exists");
        acc + e.cost.clone() * S::from_weight(weight_of(inst, set))
    })
}

/// RAFL cost recomputed from scratch with Floyd-Warshall distances.
pub fn rafl_cost(inst: &RaflInstance<Rational>, a: &Assignment) -> Rational {
    let d = floyd(inst.graph());
    let mut produced: BTreeMap<usize, BTreeSet<PacketId>> = BTreeMap::new();
    let mut total = q(0);
    for t in inst.terminals() {
        let f = inst.facilities().iter().position(|f| f.id == a.map[&t.id]).unwrap();
        produced.entry(f).or_default().extend(t.demand.iter().copied());
        let w: u64 = t.demand.iter().map(|p| inst.universe().weight(*p).unwrap()).sum();
        total += q(w as i64) * d[t.node][inst.facilities()[f].node].clone().unwrap();
    }
    for (f, set) in produced {
        let w: u64 = set.iter().map(|p| inst.universe().weight(*p).unwrap()).sum();
        total += inst.facilities()[f].lambda.clone() * q(w as i64);
    }
    total
}

pub fn floyd(g: &WeightedGraph<Rational>) -> Vec<Vec<Option<Rational>>> {
    let n = g.node_count();
    let mut d: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(q(0));
    }
    for e in g.edges() {
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            if d[a][b].as_ref().is_none_or(|x| e.cost < *x) {
                d[a][b] = Some(e.cost.clone());
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (&d[i][k], &d[k][j]) {
                    let via = a + b;
                    if d[i][j].as_ref().is_none_or(|x| via < *x) {
                        d[i][j] = Some(via);
                    }
                }
            }
        }
    }
    d
}

/// Exact Steiner tree cost: cheapest spanning tree over every node set that
/// contains the required nodes (Prim on the induced subgraph).
pub fn steiner_brute(g: &WeightedGraph<Rational>, required: &[NodeId]) -> Rational {
    let n = g.node_count();
    let req: BTreeSet<NodeId> = required.iter().copied().collect();
    if req.len() <= 1 {
        return q(0);
    }
    let optional: Vec<NodeId> = (0..n).filter(|v| !req.contains(v)).collect();
    let mut best: Option<Rational> = None;
    for mask in 0u32..(1 << optional.len()) {
        let mut nodes: Vec<NodeId> = req.iter().copied().collect();
        nodes.extend(optional.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| *v));
        if let Some(c) = prim(g, &nodes) {
            if best.as_ref().is_none_or(|b| c < *b) {
                best = Some(c);
            }
        }
    }
    best.expect("required nodes connected")
}

fn prim(g: &WeightedGraph<Rational>, nodes: &[NodeId]) -> Option<Rational> {
    let inside: BTreeSet<NodeId> = nodes.iter().copied().collect();
    let mut tree: BTreeSet<NodeId> = BTreeSet::from([nodes[0]]);
    let mut cost = q(0);
    while tree.len() < inside.len() {
        let next = g
            .edges()
            .iter()
            .filter(|e| inside.contains(&e.u) && inside.contains(&e.v) && (tree.contains(&e.u) != tree.contains(&e.v)))
            .min_by(|a, b| a.cost.cmp(&b.cost))?;
        cost += next.cost.clone();
        tree.insert(next.u);
        tree.insert(next.v);
    }
    Some(cost)
}

/// All simple paths from `from` to `to` as node lists.
pub fn all_simple_paths(g: &WeightedGraph<Rational>, from: NodeId, to: NodeId) -> Vec<Vec<NodeId>> {
    fn go(g: &WeightedGraph<Rational>, to: NodeId, path: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        let cur = *path.last().unwrap();
        if cur == to {
            out.push(path.clone());
            return;
        }
        for e in g.edges() {
            let next = if e.u == cur {
                e.v
            } else if e.v == cur {
                e.u
            } else {
                continue;
            };
            if !path.contains(&next) {
                path.push(next);
                go(g, to, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(g, to, &mut vec![from], &mut out);
    out
}

/// Plain enumeration of every combination of simple paths.
pub fn rand_brute(inst: &RandInstance<Rational>) -> Rational {
    let options: Vec<Vec<Vec<NodeId>>> = inst.terminals().iter().map(|t| all_simple_paths(inst.graph(), t.node, inst.source())).collect();
    let mut idx = vec![0usize; options.len()];
    let mut best: Option<Rational> = None;
    loop {
        let mut sol = RandSolution::new();
        for (t, (opts, &k)) in inst.terminals().iter().zip(options.iter().zip(&idx)) {
            sol.insert(t.id, opts[k].clone());
        }
        let c = rand_cost(inst, &sol);
        if best.as_ref().is_none_or(|b| c < *b) {
            best = Some(c);
        }
        let mut i = 0;
        while i < idx.len() {
            idx[i] += 1;
            if idx[i] < options[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == idx.len() {
            return best.unwrap();
        }
    }
}

/// Plain enumeration of assignments.
pub fn rafl_brute(inst: &RaflInstance<Rational>) -> Rational {
    let nt = inst.terminals().len();
    let nf = inst.facilities().len();
    let mut best: Option<Rational> = None;
    for code in 0..nf.pow(nt as u32) {
        let mut a = Assignment::new();
        let mut c = code;
        for t in inst.terminals() {
            a.assign(t.id, inst.facilities()[c % nf].id);
            c /= nf;
        }
        let v = rafl_cost(inst, &a);
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    }
    best.unwrap()
}

/// Small random generator settings for oracle-sized instances.
pub fn small_config(rng: &mut ChaCha8Rng, max_nodes: usize, max_terminals: usize, max_packets: usize) -> GeneratorConfig {
    GeneratorConfig {
        seed: rng.random(),
        nodes: rng.random_range(2..=max_nodes),
        density: rng.random_range(0.0..0.6),
        terminals: rng.random_range(1..=max_terminals),
        packets: rng.random_range(1..=max_packets),
        branching: rng.random_range(1..=3),
        weight: (1, rng.random_range(1..=5)),
        cost: (1, rng.random_range(1..=9)),
        lambda: (1, rng.random_range(1..=9)),
        facilities: rng.random_range(1..=4),
    }
}

pub fn is_zero(v: &Rational) -> bool {
    v.is_zero()
}
