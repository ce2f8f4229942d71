//! Line-oriented text format for instances and solutions.
//!
//! ```text
//! problem rand
//! nodes 3
//! source 0
//! packet 0 1
//! packet 1 2
//! edge 0 1 1
//! edge 1 2 3/2
//! terminal 0 2 0 1
//! ```
//!
//! RAFL files use `problem rafl`, omit `source` and add
//! `facility <id> <node> <lambda>` lines. Blank lines and `#` comments are
//! ignored. Numbers are integers, decimals or fractions `p/q`.
//!
//! Solutions: `solution rand` followed by `path <terminal> <node>...` lines
//! (terminal location first, source last), or `solution rafl` followed by
//! `assign <terminal> <facility>` lines.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{
    Assignment, Facility, FacilityId, NodeId, PacketId, PacketUniverse, RaflInstance, RandInstance, RandSolution, Terminal, TerminalId,
    WeightedGraph,
};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Rand,
    Rafl,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Rand => "rand",
            Problem::Rafl => "rafl",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Instance<S> {
    Rand(RandInstance<S>),
    Rafl(RaflInstance<S>),
}

impl<S: Scalar> Instance<S> {
    pub fn problem(&self) -> Problem {
        match self {
            Instance::Rand(_) => Problem::Rand,
            Instance::Rafl(_) => Problem::Rafl,
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Instance::Rand(i) => write_rand(i),
            Instance::Rafl(i) => write_rafl(i),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Rand(RandSolution),
    Rafl(Assignment),
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Non-comment lines with their 1-based numbers, split on whitespace.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = body.split_whitespace().collect();
        (!fields.is_empty()).then_some((i + 1, fields))
    })
}

fn int<T: FromStr>(line: usize, field: &str, what: &str) -> Result<T> {
    field.parse().map_err(|_| parse_err(line, format!("invalid {what} '{field}'")))
}

fn scalar<S: Scalar>(line: usize, field: &str, what: &str) -> Result<S> {
    S::parse_literal(field).ok_or_else(|| parse_err(line, format!("invalid {what} '{field}'")))
}

fn arity(line: usize, fields: &[&str], min: usize, exact: bool) -> Result<()> {
    let ok = if exact { fields.len() == min } else { fields.len() >= min };
    if ok {
        Ok(())
    } else {
        Err(parse_err(line, format!("wrong number of fields for '{}'", fields[0])))
    }
}

pub fn parse_instance<S: Scalar>(text: &str) -> Result<Instance<S>> {
    let mut problem = None;
    let mut nodes: Option<usize> = None;
    let mut source: Option<(usize, NodeId)> = None;
    let mut packets: Vec<(PacketId, u64)> = Vec::new();
    let mut edges: Vec<(NodeId, NodeId, S)> = Vec::new();
    let mut terminals: Vec<(usize, Terminal)> = Vec::new();
    let mut facilities: Vec<(usize, Facility<S>)> = Vec::new();
    for (line, f) in records(text) {
        let node = |field: &str| -> Result<NodeId> {
            let n: NodeId = int(line, field, "node")?;
            match nodes {
                Some(count) if n < count => Ok(n),
                Some(_) => Err(parse_err(line, format!("unknown node {n}"))),
                None => Err(parse_err(line, "'nodes' must come before node references")),
            }
        };
        match f[0] {
            "problem" => {
                arity(line, &f, 2, true)?;
                problem = Some(match f[1] {
                    "rand" => Problem::Rand,
                    "rafl" => Problem::Rafl,
                    other => return Err(parse_err(line, format!("unknown problem '{other}'"))),
                });
            }
            "nodes" => {
                arity(line, &f, 2, true)?;
                nodes = Some(int(line, f[1], "node count")?);
            }
            "source" => {
                arity(line, &f, 2, true)?;
                source = Some((line, node(f[1])?));
            }
            "packet" => {
                arity(line, &f, 3, true)?;
                packets.push((PacketId(int(line, f[1], "packet id")?), int(line, f[2], "packet weight")?));
            }
            "edge" => {
                arity(line, &f, 4, true)?;
                edges.push((node(f[1])?, node(f[2])?, scalar(line, f[3], "edge cost")?));
            }
            "terminal" => {
                arity(line, &f, 3, false)?;
                let id = TerminalId(int(line, f[1], "terminal id")?);
                let at = node(f[2])?;
                let mut demand = BTreeSet::new();
                for p in &f[3..] {
                    let p = PacketId(int(line, p, "packet id")?);
                    if !packets.iter().any(|(q, _)| *q == p) {
                        return Err(parse_err(line, format!("unknown packet {p}")));
                    }
                    demand.insert(p);
                }
                terminals.push((line, Terminal { id, node: at, demand }));
            }
            "facility" => {
                arity(line, &f, 4, true)?;
                let id = FacilityId(int(line, f[1], "facility id")?);
                facilities.push((line, Facility { id, node: node(f[2])?, lambda: scalar(line, f[3], "lambda")? }));
            }
            other => return Err(parse_err(line, format!("unknown record '{other}'"))),
        }
    }
    let problem = problem.ok_or_else(|| parse_err(0, "missing 'problem' line"))?;
    let nodes = nodes.ok_or_else(|| parse_err(0, "missing 'nodes' line"))?;
    let universe = PacketUniverse::new(packets)?;
    let graph = WeightedGraph::new(nodes, edges)?;
    let terminals = terminals.into_iter().map(|(_, t)| t).collect();
    match problem {
        Problem::Rand => {
            if let Some((line, _)) = facilities.first() {
                return Err(parse_err(*line, "facility in a rand instance"));
            }
            let (_, source) = source.ok_or_else(|| parse_err(0, "missing 'source' line"))?;
            Ok(Instance::Rand(RandInstance::new(graph, source, universe, terminals)?))
        }
        Problem::Rafl => {
            if let Some((line, _)) = source {
                return Err(parse_err(line, "source in a rafl instance"));
            }
            let facilities = facilities.into_iter().map(|(_, f)| f).collect();
            Ok(Instance::Rafl(RaflInstance::new(graph, universe, terminals, facilities)?))
        }
    }
}

fn write_common<S: Scalar>(
    out: &mut String,
    problem: Problem,
    graph: &WeightedGraph<S>,
    source: Option<NodeId>,
    universe: &PacketUniverse,
) {
    writeln!(out, "problem {}", problem.name()).unwrap();
    writeln!(out, "nodes {}", graph.node_count()).unwrap();
    if let Some(s) = source {
        writeln!(out, "source {s}").unwrap();
    }
    for (p, w) in universe.iter() {
        writeln!(out, "packet {p} {w}").unwrap();
    }
    for e in graph.edges() {
        writeln!(out, "edge {} {} {}", e.u, e.v, e.cost.to_exact_string()).unwrap();
    }
}

fn write_terminals(out: &mut String, terminals: &[Terminal]) {
    for t in terminals {
        write!(out, "terminal {} {}", t.id, t.node).unwrap();
        for p in &t.demand {
            write!(out, " {p}").unwrap();
        }
        out.push('\n');
    }
}

/// Canonical text of a RAND instance.
pub fn write_rand<S: Scalar>(inst: &RandInstance<S>) -> String {
    let mut out = String::new();
    write_common(&mut out, Problem::Rand, inst.graph(), Some(inst.source()), inst.universe());
    write_terminals(&mut out, inst.terminals());
    out
}

/// Canonical text of a RAFL instance.
pub fn write_rafl<S: Scalar>(inst: &RaflInstance<S>) -> String {
    let mut out = String::new();
    write_common(&mut out, Problem::Rafl, inst.graph(), None, inst.universe());
    write_terminals(&mut out, inst.terminals());
    for f in inst.facilities() {
        writeln!(out, "facility {} {} {}", f.id, f.node, f.lambda.to_exact_string()).unwrap();
    }
    out
}

pub fn parse_solution(text: &str) -> Result<Solution> {
    let mut kind = None;
    let mut paths = RandSolution::new();
    let mut assignment = Assignment::new();
    for (line, f) in records(text) {
        match (f[0], kind) {
            ("solution", None) => {
                arity(line, &f, 2, true)?;
                kind = Some(match f[1] {
                    "rand" => Problem::Rand,
                    "rafl" => Problem::Rafl,
                    other => return Err(parse_err(line, format!("unknown solution kind '{other}'"))),
                });
            }
            ("path", Some(Problem::Rand)) => {
                arity(line, &f, 3, false)?;
                let t = TerminalId(int(line, f[1], "terminal id")?);
                let nodes = f[2..].iter().map(|n| int(line, n, "node")).collect::<Result<Vec<NodeId>>>()?;
                if paths.path(t).is_some() {
                    return Err(parse_err(line, format!("second path for terminal {t}")));
                }
                paths.insert(t, nodes);
            }
            ("assign", Some(Problem::Rafl)) => {
                arity(line, &f, 3, true)?;
                let t = TerminalId(int(line, f[1], "terminal id")?);
                if assignment.get(t).is_some() {
                    return Err(parse_err(line, format!("second assignment for terminal {t}")));
                }
                assignment.assign(t, FacilityId(int(line, f[2], "facility id")?));
            }
            (other, _) => return Err(parse_err(line, format!("unexpected record '{other}'"))),
        }
    }
    match kind {
        Some(Problem::Rand) => Ok(Solution::Rand(paths)),
        Some(Problem::Rafl) => Ok(Solution::Rafl(assignment)),
        None => Err(parse_err(0, "missing 'solution' line")),
    }
}

pub fn write_rand_solution(sol: &RandSolution) -> String {
    let mut out = String::from("solution rand\n");
    for (t, path) in &sol.paths {
        write!(out, "path {t}").unwrap();
        for n in path {
            write!(out, " {n}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_rafl_solution(a: &Assignment) -> String {
    let mut out = String::from("solution rafl\n");
    for (t, f) in &a.map {
        writeln!(out, "assign {t} {f}").unwrap();
    }
    out
}
