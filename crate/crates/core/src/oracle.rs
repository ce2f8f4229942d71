//! Exhaustive solvers for tiny instances, the ground truth of every ratio check.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{eval_rafl_cost, Assignment, NodeId, RaflInstance, RandInstance, RandSolution, WeightedGraph};
use crate::scalar::Scalar;

/// Default cap on the size of the search space.
pub const DEFAULT_CAP: u128 = 10_000_000;

/// Environment variable overriding [`DEFAULT_CAP`].
pub const CAP_ENV: &str = "REDUND_ORACLE_CAP";

/// [`DEFAULT_CAP`] unless `REDUND_ORACLE_CAP` holds a number.
pub fn default_cap() -> u128 {
    std::env::var(CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_CAP)
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult<S, T> {
    pub cost: S,
    #[serde(skip)]
    pub solution: T,
    /// Candidate solutions (RAFL) or search nodes (RAND) visited.
    pub explored: u128,
}

/// Tries every assignment of terminals to facilities.
pub fn oracle_rafl<S: Scalar>(inst: &RaflInstance<S>, cap: u128) -> Result<OracleResult<S, Assignment>> {
    let (nt, nf) = (inst.terminals().len(), inst.facilities().len());
    let space = (nf as u128).checked_pow(nt as u32).unwrap_or(u128::MAX);
    if space > cap {
        return Err(Error::CapExceeded { what: "RAFL enumeration", size: space, cap });
    }
    let mut choice = vec![0usize; nt];
    let mut best: Option<(S, Assignment)> = None;
    let mut explored = 0u128;
    loop {
        explored += 1;
        let mut a = Assignment::new();
        for (ti, &fi) in choice.iter().enumerate() {
            a.assign(inst.terminals()[ti].id, inst.facilities()[fi].id);
        }
        let cost = eval_rafl_cost(&a, inst)?.total();
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, a));
        }
        // Odometer increment.
        let mut i = 0;
        while i < nt {
            choice[i] += 1;
            if choice[i] < nf {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == nt {
            break;
        }
    }
    let (cost, solution) = best.expect("at least one assignment");
    Ok(OracleResult { cost, solution, explored })
}

struct PathOption<S> {
    nodes: Vec<NodeId>,
    edges: Vec<usize>,
    length: S,
}

/// All simple paths from `from` to `to`, or `None` once more than `cap` exist.
fn simple_paths<S: Scalar>(g: &WeightedGraph<S>, from: NodeId, to: NodeId, cap: u128) -> Option<Vec<PathOption<S>>> {
    fn dfs<S: Scalar>(
        g: &WeightedGraph<S>,
        to: NodeId,
        nodes: &mut Vec<NodeId>,
        edges: &mut Vec<usize>,
        on_path: &mut [bool],
        out: &mut Vec<PathOption<S>>,
        cap: u128,
    ) -> bool {
        let cur = *nodes.last().expect("nonempty");
        if cur == to {
            out.push(PathOption { nodes: nodes.clone(), edges: edges.clone(), length: g.cost_of(edges.iter()) });
            return (out.len() as u128) <= cap;
        }
        for &(next, e) in g.neighbors(cur) {
            if on_path[next] {
                continue;
            }
            on_path[next] = true;
            nodes.push(next);
            edges.push(e);
            let ok = dfs(g, to, nodes, edges, on_path, out, cap);
            nodes.pop();
            edges.pop();
            on_path[next] = false;
            if !ok {
                return false;
            }
        }
        true
    }
    let mut on_path = vec![false; g.node_count()];
    on_path[from] = true;
    let mut out = Vec::new();
    if !dfs(g, to, &mut vec![from], &mut Vec::new(), &mut on_path, &mut out, cap) {
        return None;
    }
    out.sort_by(|a, b| a.length.total_cmp(&b.length).then_with(|| a.nodes.cmp(&b.nodes)));
    Some(out)
}

struct RandSearch<'a, S> {
    options: Vec<Vec<PathOption<S>>>,
    /// Packet indices demanded by each terminal, with their weights as scalars.
    demands: Vec<Vec<(usize, S)>>,
    graph: &'a WeightedGraph<S>,
    /// `carriers[e][p]` counts chosen paths through edge e that demand packet p.
    carriers: Vec<Vec<u32>>,
    chosen: Vec<usize>,
    best: Option<(S, Vec<usize>)>,
    explored: u128,
}

impl<S: Scalar> RandSearch<'_, S> {
    fn descend(&mut self, t: usize, partial: S) {
        self.explored += 1;
        if self.best.as_ref().is_some_and(|(b, _)| partial >= *b) {
            return;
        }
        if t == self.options.len() {
            self.best = Some((partial, self.chosen.clone()));
            return;
        }
        for k in 0..self.options[t].len() {
            let mut added = S::zero();
            for &e in &self.options[t][k].edges {
                for (p, w) in &self.demands[t] {
                    if self.carriers[e][*p] == 0 {
                        added = added + self.graph.edge(e).cost.clone() * w.clone();
                    }
                    self.carriers[e][*p] += 1;
                }
            }
            self.chosen.push(k);
            self.descend(t + 1, partial.clone() + added);
            self.chosen.pop();
            for &e in &self.options[t][k].edges {
                for (p, _) in &self.demands[t] {
                    self.carriers[e][*p] -= 1;
                }
            }
        }
    }
}

/// Minimum-cost choice of one simple source path per terminal.
///
/// Refuses when the number of path combinations exceeds `cap`. Partial costs
/// only grow as terminals are added, so branches already as expensive as the
/// incumbent are cut.
pub fn oracle_rand<S: Scalar>(inst: &RandInstance<S>, cap: u128) -> Result<OracleResult<S, RandSolution>> {
    let g = inst.graph();
    let mut options = Vec::with_capacity(inst.terminals().len());
    let mut space: u128 = 1;
    for t in inst.terminals() {
        let paths = simple_paths(g, t.node, inst.source(), cap).ok_or(Error::CapExceeded {
            what: "RAND path enumeration",
            size: cap.saturating_add(1),
            cap,
        })?;
        space = space.saturating_mul(paths.len() as u128);
        if space > cap {
            return Err(Error::CapExceeded { what: "RAND path enumeration", size: space, cap });
        }
        options.push(paths);
    }
    let packets: Vec<_> = inst.universe().ids().collect();
    let demands = inst
        .terminals()
        .iter()
        .map(|t| {
            t.demand
                .iter()
                .map(|p| {
                    (packets.binary_search(p).expect("known packet"), S::from_weight(inst.universe().weight(*p).expect("known packet")))
                })
                .collect()
        })
        .collect();
    let mut search = RandSearch {
        options,
        demands,
        graph: g,
        carriers: vec![vec![0; packets.len()]; g.edge_count()],
        chosen: Vec::new(),
        best: None,
        explored: 0,
    };
    search.descend(0, S::zero());
    let (cost, picks) = search.best.expect("every terminal has a path");
    let mut solution = RandSolution::new();
    for ((t, opts), k) in inst.terminals().iter().zip(&search.options).zip(picks) {
        solution.insert(t.id, opts[k].nodes.clone());
    }
    Ok(OracleResult { cost, solution, explored: search.explored })
}
