//! LP rounding for facility location with laminar demands.
//!
//! Three phases: filter the fractional optimum so every terminal only uses
//! nearby facilities, classify terminals as paying or free in order of LP
//! routing cost, then open facilities level by level for the free terminals
//! and send each paying terminal to its cheapest remaining facility.
//!
//! The solver also returns a [`Certificate`] re-checking every intermediate
//! bound of the analysis on the concrete run.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{per_terminal_averages, solve_rafl_lp, FractionalSolution};
use crate::model::{eval_rafl_cost, Assignment, PacketId, PacketSet, PacketUniverse, RaflCost, RaflInstance};
use crate::scalar::Scalar;

/// Fractional solution after the filtering phase.
#[derive(Debug, Clone, Serialize)]
pub struct FilteredSolution<S> {
    pub alpha: S,
    /// `x[t][f]`, rows summing to one.
    pub x: Vec<Vec<S>>,
    /// `y[f][p]`, packets in universe order.
    pub y: Vec<Vec<S>>,
    /// Facility positions with positive `x[t][f]`, ascending.
    pub support: Vec<Vec<usize>>,
    /// `C_r*(t)` of the unfiltered optimum.
    pub lp_routing: Vec<S>,
    /// `C_r(t)` after filtering.
    pub routing: Vec<S>,
    /// `C_f(t)` after filtering.
    pub opening: Vec<S>,
}

impl<S: Scalar> FilteredSolution<S> {
    /// `C_f(x, y) = sum_f lambda_f sum_p w_p y[f][p]`.
    pub fn facility_cost(&self, inst: &RaflInstance<S>) -> S {
        let weights: Vec<S> = inst.universe().iter().map(|(_, w)| S::from_weight(w)).collect();
        inst.facilities().iter().zip(&self.y).fold(S::zero(), |acc, (f, row)| {
            let produced = row.iter().zip(&weights).fold(S::zero(), |a, (y, w)| a + y.clone() * w.clone());
            acc + f.lambda.clone() * produced
        })
    }
}

fn sum<S: Scalar>(values: &[S]) -> S {
    values.iter().fold(S::zero(), |a, v| a + v.clone())
}

/// Drops every facility farther than `alpha * C_r*(t)` from `t`, rescales the
/// row back to one and recomputes `y` as the per-packet maximum.
pub fn filter<S: Scalar>(star: &FractionalSolution<S>, inst: &RaflInstance<S>, alpha: &S) -> Result<FilteredSolution<S>> {
    if *alpha <= S::one() {
        return Err(Error::InvalidInstance(format!("alpha must exceed 1, got {alpha}")));
    }
    let averages = per_terminal_averages(star, inst);
    let nf = inst.facilities().len();
    let mut x = Vec::with_capacity(star.x.len());
    let mut support = Vec::with_capacity(star.x.len());
    for (ti, row) in star.x.iter().enumerate() {
        let threshold = alpha.clone() * averages[ti].0.clone();
        let mut kept: Vec<S> = (0..nf)
            .map(|fi| if row[fi].is_positive_tol() && !inst.distance(ti, fi).gt_tol(&threshold) { row[fi].clone() } else { S::zero() })
            .collect();
        let total = sum(&kept);
        if !total.is_positive() {
            return Err(Error::Internal(format!("terminal {} lost all facilities in filtering", inst.terminals()[ti].id)));
        }
        for v in kept.iter_mut() {
            *v = v.clone() / total.clone();
        }
        support.push((0..nf).filter(|&fi| kept[fi].is_positive()).collect());
        x.push(kept);
    }
    let packets: Vec<PacketId> = inst.universe().ids().collect();
    let mut y = vec![vec![S::zero(); packets.len()]; nf];
    for (ti, t) in inst.terminals().iter().enumerate() {
        for p in &t.demand {
            let pi = packets.binary_search(p).expect("demand within universe");
            for fi in 0..nf {
                if x[ti][fi] > y[fi][pi] {
                    y[fi][pi] = x[ti][fi].clone();
                }
            }
        }
    }
    let lp_routing = averages.into_iter().map(|(r, _)| r).collect();
    let mut out = FilteredSolution { alpha: alpha.clone(), x, y, support, lp_routing, routing: Vec::new(), opening: Vec::new() };
    let star_view = FractionalSolution { x: out.x.clone(), y: out.y.clone(), objective: S::zero() };
    (out.routing, out.opening) = per_terminal_averages(&star_view, inst).into_iter().unzip();
    Ok(out)
}

/// Weighted covering test: the part of `demand` outside the union of `cover`
/// weighs strictly less than half of `demand`.
pub fn covers<'a>(universe: &PacketUniverse, cover: impl IntoIterator<Item = &'a PacketSet>, demand: &PacketSet) -> bool {
    let mut residual = demand.clone();
    for d in cover {
        residual.retain(|p| !d.contains(p));
    }
    2 * universe.total_weight(&residual) < universe.total_weight(demand)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Class {
    Paying,
    Free,
}

/// Phase 2 output plus the level bookkeeping of phase 3. Terminals and
/// facilities are referred to by position in the instance.
#[derive(Debug, Clone, Serialize)]
pub struct ClassificationState {
    /// Terminals by increasing `C_r*`, ties by id.
    pub order: Vec<usize>,
    pub class: Vec<Class>,
    /// `Ã(t)` for free terminals.
    pub temporary: Vec<Option<usize>>,
    /// `Cov(t)`, empty for paying terminals.
    pub cover: Vec<Vec<usize>>,
    /// `Pay(f)` in insertion order.
    pub pay: Vec<Vec<usize>>,
    pub level: Vec<u32>,
    /// `Γ_d(t)` for free terminals (contains `t`), empty for paying ones.
    pub group: Vec<Vec<usize>>,
}

impl ClassificationState {
    pub fn paying(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.class.len()).filter(|&t| self.class[t] == Class::Paying)
    }

    pub fn free(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.class.len()).filter(|&t| self.class[t] == Class::Free)
    }
}

/// Smallest `d >= 0` with `2^d >= value` (up to tolerance).
pub fn level_of<S: Scalar>(value: &S) -> u32 {
    let two = S::one() + S::one();
    let mut d = 0;
    let mut bound = S::one();
    while value.gt_tol(&bound) {
        bound = bound * two.clone();
        d += 1;
    }
    d
}

fn argmin_by<S: Scalar>(items: impl IntoIterator<Item = usize>, key: impl Fn(usize) -> S) -> Option<usize> {
    // Items arrive in ascending position, so keeping the first minimum breaks ties by id.
    let mut best: Option<(usize, S)> = None;
    for i in items {
        let k = key(i);
        if best.as_ref().is_none_or(|(_, b)| k < *b) {
            best = Some((i, k));
        }
    }
    best.map(|(i, _)| i)
}

/// Paying/free classification, levels and groups.
pub fn classify<S: Scalar>(fs: &FilteredSolution<S>, inst: &RaflInstance<S>) -> ClassificationState {
    let n = inst.terminals().len();
    let terminals = inst.terminals();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| fs.lp_routing[a].total_cmp(&fs.lp_routing[b]).then(a.cmp(&b)));

    let mut class = vec![Class::Paying; n];
    let mut temporary = vec![None; n];
    let mut cover = vec![Vec::new(); n];
    let mut pay: Vec<Vec<usize>> = vec![Vec::new(); inst.facilities().len()];
    for &t in &order {
        let demand = &terminals[t].demand;
        let covering =
            fs.support[t].iter().copied().filter(|&f| covers(inst.universe(), pay[f].iter().map(|&j| &terminals[j].demand), demand));
        let chosen = argmin_by(covering, |f| inst.facilities()[f].lambda.clone());
        match chosen {
            Some(f) => {
                class[t] = Class::Free;
                temporary[t] = Some(f);
                cover[t] = pay[f].iter().copied().filter(|&j| !terminals[j].demand.is_disjoint(demand)).collect();
                cover[t].sort_unstable();
            }
            None => {
                for &f in &fs.support[t] {
                    pay[f].push(t);
                }
            }
        }
    }

    let mut level = vec![0; n];
    for t in 0..n {
        if class[t] == Class::Paying {
            level[t] = level_of(&fs.opening[t]);
        }
    }
    for t in 0..n {
        if class[t] == Class::Free {
            level[t] = cover[t].iter().map(|&j| level[j]).min().expect("covered terminal has a nonempty cover");
        }
    }
    let mut group = vec![Vec::new(); n];
    for t in 0..n {
        if class[t] != Class::Free {
            continue;
        }
        group[t] = (0..n)
            .filter(|&u| class[u] == Class::Free && level[u] == level[t] && cover[u].iter().any(|j| cover[t].binary_search(j).is_ok()))
            .collect();
    }
    ClassificationState { order, class, temporary, cover, pay, level, group }
}

/// One opening of a facility by a free terminal. Repeated openings of the
/// same facility are separate copies, each paid for by its own terminals.
#[derive(Debug, Clone, Serialize)]
pub struct FacilityCopy {
    pub facility: usize,
    pub level: u32,
    /// The terminal that opened the copy.
    pub opener: usize,
    /// `FPay`: the opener's cover.
    pub payers: Vec<usize>,
    /// Free terminals assigned in this step, the opener included.
    pub members: Vec<usize>,
    /// `D(opener)` together with the payers' demands.
    pub charged: PacketSet,
}

#[derive(Debug, Clone, Serialize)]
pub struct Opening {
    /// Facility position per terminal.
    pub facility: Vec<usize>,
    pub copies: Vec<FacilityCopy>,
}

impl Opening {
    pub fn assignment<S: Scalar>(&self, inst: &RaflInstance<S>) -> Assignment {
        let mut a = Assignment::new();
        for (t, &f) in self.facility.iter().enumerate() {
            a.assign(inst.terminals()[t].id, inst.facilities()[f].id);
        }
        a
    }
}

/// Phase 3: opens facilities for the free terminals, then routes paying terminals.
///
/// A terminal of `Γ_d(t)` that already received a facility earlier at the
/// same level keeps it.
pub fn open_facilities<S: Scalar>(cs: &ClassificationState, fs: &FilteredSolution<S>, inst: &RaflInstance<S>) -> Opening {
    let terminals = inst.terminals();
    let lambda = |f: usize| inst.facilities()[f].lambda.clone();
    let mut facility: Vec<Option<usize>> = vec![None; terminals.len()];
    let mut copies = Vec::new();
    let levels: BTreeSet<u32> = cs.free().map(|t| cs.level[t]).collect();
    for d in levels {
        let mut waiting: BTreeSet<usize> = cs.free().filter(|&t| cs.level[t] == d).collect();
        while !waiting.is_empty() {
            // Heaviest demand first, ties by smallest id.
            let t = waiting
                .iter()
                .copied()
                .max_by(|&a, &b| inst.demand_weight(a).cmp(&inst.demand_weight(b)).then(b.cmp(&a)))
                .expect("nonempty");
            let t_bar = argmin_by(cs.group[t].iter().copied(), |j| fs.lp_routing[j].clone()).expect("group contains t");
            let candidates: BTreeSet<usize> = cs.cover[t_bar].iter().flat_map(|&j| fs.support[j].iter().copied()).collect();
            let phi = argmin_by(candidates, lambda).expect("payers have facilities");
            let members: Vec<usize> = cs.group[t].iter().copied().filter(|u| waiting.contains(u)).collect();
            for &u in &members {
                facility[u] = Some(phi);
                waiting.remove(&u);
            }
            let mut charged = terminals[t].demand.clone();
            for &j in &cs.cover[t] {
                charged.extend(terminals[j].demand.iter().copied());
            }
            copies.push(FacilityCopy { facility: phi, level: d, opener: t, payers: cs.cover[t].clone(), members, charged });
        }
    }
    for t in cs.paying() {
        facility[t] = argmin_by(fs.support[t].iter().copied(), lambda);
    }
    let facility = facility.into_iter().map(|f| f.expect("every terminal assigned")).collect();
    Opening { facility, copies }
}

/// A single inequality re-checked on a run.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck<S> {
    pub name: String,
    pub lhs: S,
    pub rhs: S,
    pub holds: bool,
}

impl<S: Scalar> BoundCheck<S> {
    fn new(name: impl Into<String>, lhs: S, rhs: S) -> Self {
        let holds = lhs.le_tol(&rhs);
        Self { name: name.into(), lhs, rhs, holds }
    }
}

/// Worst-case factor `max(9 alpha, 18 alpha / (alpha - 1))`; 27 at `alpha = 3`.
pub fn ratio_bound<S: Scalar>(alpha: &S) -> S {
    let nine = S::from_weight(9);
    let routing = nine.clone() * alpha.clone();
    let facility = nine.clone() * (S::one() + S::one()) * alpha.clone() / (alpha.clone() - S::one());
    S::max_of(routing, facility)
}

/// Intermediate quantities of a run and the bounds they satisfy. Costs are in
/// the units of the instance given to [`solve_rafl`]; the checks themselves are
/// scale free.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate<S> {
    pub alpha: S,
    pub lp_value: S,
    /// `C_r*`, the routing part of the LP optimum.
    pub lp_routing: S,
    /// `C_f*`, the facility part of the LP optimum.
    pub lp_facility: S,
    /// `C_f(x, y)` after filtering.
    pub filtered_facility: S,
    /// Facility cost with every opening paid separately.
    pub copy_facility_cost: S,
    pub cost: RaflCost<S>,
    pub paying: usize,
    pub free: usize,
    pub copies: usize,
    pub checks: Vec<BoundCheck<S>>,
}

impl<S: Scalar> Certificate<S> {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck<S>> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

/// Every phase of a run on the normalized instance.
#[derive(Debug, Clone)]
pub struct RaflRun<S> {
    /// Scale factor between the input and the normalized instance.
    pub scale: S,
    pub normalized: RaflInstance<S>,
    pub lp: FractionalSolution<S>,
    pub filtered: FilteredSolution<S>,
    pub classes: ClassificationState,
    pub opening: Opening,
    pub assignment: Assignment,
    pub certificate: Certificate<S>,
}

fn certify<S: Scalar>(
    inst: &RaflInstance<S>,
    lp: &FractionalSolution<S>,
    fs: &FilteredSolution<S>,
    cs: &ClassificationState,
    op: &Opening,
    scale: &S,
) -> Result<Certificate<S>> {
    let alpha = &fs.alpha;
    let universe = inst.universe();
    let w = |set: &PacketSet| S::from_weight(universe.total_weight(set));
    let lambda = |f: usize| inst.facilities()[f].lambda.clone();
    let lp_facility = lp.facility_cost(inst);
    let lp_routing = lp.routing_cost(inst);
    let filtered_facility = fs.facility_cost(inst);
    let assignment = op.assignment(inst);
    let cost = eval_rafl_cost(&assignment, inst)?;
    let mut checks = Vec::new();
    // Cost checks are reported in input units; packet and count checks are unitless.
    let money = |name: String, lhs: S, rhs: S| BoundCheck::new(name, lhs * scale.clone(), rhs * scale.clone());

    let nine_alpha = S::from_weight(9) * alpha.clone();
    for (t, term) in inst.terminals().iter().enumerate() {
        checks.push(money(
            format!("routing t{}", term.id),
            inst.distance(t, op.facility[t]).clone(),
            nine_alpha.clone() * fs.lp_routing[t].clone(),
        ));
    }
    let mass = alpha.clone() / (alpha.clone() - S::one());
    checks.push(money("filtered facility mass".into(), filtered_facility.clone(), mass.clone() * lp_facility.clone()));
    let paying_mass = cs.paying().fold(S::zero(), |a, t| a + w(&inst.terminals()[t].demand) * fs.opening[t].clone());
    checks.push(money("paying mass".into(), paying_mass, (S::one() + S::one()) * filtered_facility.clone()));

    for (k, copy) in op.copies.iter().enumerate() {
        let mut served = PacketSet::new();
        for &m in &copy.members {
            served.extend(inst.terminals()[m].demand.iter().copied());
        }
        let outside = served.difference(&copy.charged).count();
        checks.push(BoundCheck::new(format!("copy {k} members inside charged set"), S::from_weight(outside as u64), S::zero()));
        let mut payers = PacketSet::new();
        for &j in &copy.payers {
            payers.extend(inst.terminals()[j].demand.iter().copied());
        }
        checks.push(BoundCheck::new(format!("copy {k} charged weight"), w(&copy.charged), (S::one() + S::one()) * w(&payers)));
    }

    let mut per_level: BTreeMap<(usize, u32), u64> = BTreeMap::new();
    for copy in &op.copies {
        for &j in &copy.payers {
            *per_level.entry((j, copy.level)).or_default() += 1;
        }
    }
    let repeats = per_level.values().copied().max().unwrap_or(0);
    let above = per_level.keys().filter(|(j, d)| *d > cs.level[*j]).count();
    checks.push(BoundCheck::new("payer copies per level", S::from_weight(repeats), S::one()));
    checks.push(BoundCheck::new("payer copies above own level", S::from_weight(above as u64), S::zero()));

    let free_part = op.copies.iter().fold(S::zero(), |a, c| a + lambda(c.facility) * w(&c.charged));
    let paying_part = cs.paying().fold(S::zero(), |a, t| a + lambda(op.facility[t]) * w(&inst.terminals()[t].demand));
    let copy_facility_cost = free_part + paying_part;
    checks.push(money("merged facility cost".into(), cost.facility.clone(), copy_facility_cost.clone()));
    let eighteen = S::from_weight(18);
    checks.push(money("copy facility cost".into(), copy_facility_cost.clone(), eighteen * mass * lp_facility.clone()));
    checks.push(money("routing total".into(), cost.routing.clone(), nine_alpha * lp_routing.clone()));
    checks.push(money("total".into(), cost.total(), ratio_bound(alpha) * lp.objective.clone()));

    let up = |v: S| v * scale.clone();
    Ok(Certificate {
        alpha: alpha.clone(),
        lp_value: up(lp.objective.clone()),
        lp_routing: up(lp_routing),
        lp_facility: up(lp_facility),
        filtered_facility: up(filtered_facility),
        copy_facility_cost: up(copy_facility_cost),
        cost: RaflCost { facility: up(cost.facility), routing: up(cost.routing) },
        paying: cs.paying().count(),
        free: cs.free().count(),
        copies: op.copies.len(),
        checks,
    })
}

/// Runs all phases on the normalized copy of `inst` and keeps the intermediates.
pub fn solve_rafl_detailed<S: Scalar>(inst: &RaflInstance<S>, alpha: &S) -> Result<RaflRun<S>> {
    let norm = inst.normalized();
    let lp = solve_rafl_lp(&norm.instance)?;
    let filtered = filter(&lp, &norm.instance, alpha)?;
    let classes = classify(&filtered, &norm.instance);
    let opening = open_facilities(&classes, &filtered, &norm.instance);
    let certificate = certify(&norm.instance, &lp, &filtered, &classes, &opening, &norm.scale)?;
    let assignment = opening.assignment(&norm.instance);
    Ok(RaflRun { scale: norm.scale, normalized: norm.instance, lp, filtered, classes, opening, assignment, certificate })
}

/// Integral assignment plus its certificate.
pub fn solve_rafl<S: Scalar>(inst: &RaflInstance<S>, alpha: &S) -> Result<(Assignment, Certificate<S>)> {
    let run = solve_rafl_detailed(inst, alpha)?;
    Ok((run.assignment, run.certificate))
}
