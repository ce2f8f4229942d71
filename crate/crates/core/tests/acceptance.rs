//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use rand::Rng;
use redund::laminar::{decompose_chains, preprocess, DemandTree};
use redund::lp::solve_rafl_lp;
use redund::model::{
    eval_rand_cost, Facility, FacilityId, NodeId, PacketId, PacketSet, PacketUniverse, RaflInstance, RandInstance, RandSolution, Terminal,
    TerminalId, WeightedGraph,
};
use redund::oracle::{oracle_rafl, oracle_rand, DEFAULT_CAP};
use redund::rafl_solver::{solve_rafl_detailed, Class};
use redund::rand_solver::{log_levels, solve_rand_end_to_end, solve_rand_prim, RandConfig, Variant};
use redund::steiner::{approx_steiner, exact_steiner, DEFAULT_EXACT_CAP};
use redund::toolkit::{generate_rafl, generate_rand, to_f64_rafl, GeneratorConfig};
use redund::{Rational, Scalar};

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion(id: u32, title: &str, limit: Duration, body: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let (pass, detail) = match result {
        Ok(d) if in_time => (true, d),
        Ok(d) => (false, format!("{d}; too slow")),
        Err(e) => (false, e),
    };
    println!(
        "criterion {id} [{title}]: {} ({:.2}s of {}s) {detail}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn weight(inst: &RandInstance<Rational>, set: &PacketSet) -> u64 {
    weight_of(inst, set)
}

/// Criterion 1: preprocessing properties 1, 2, 3, 5 and idempotence.
fn preprocessing() -> Check {
    let mut r = rng(101);
    for i in 0..1000 {
        let cfg = GeneratorConfig {
            seed: r.random(),
            nodes: r.random_range(1..10),
            terminals: r.random_range(1..24),
            packets: r.random_range(1..=32),
            branching: r.random_range(1..5),
            weight: (1, r.random_range(1..30)),
            ..Default::default()
        };
        let raw = generate_rand(&cfg).map_err(|e| e.to_string())?;
        let pre = preprocess(&raw);
        for (a, b) in raw.terminals().iter().zip(pre.terminals()) {
            ensure(b.demand.is_superset(&a.demand) && weight(&pre, &b.demand) <= 2 * weight(&raw, &a.demand), || {
                format!("instance {i}: property 1 fails for terminal {}", a.id)
            })?;
        }
        ensure(is_laminar(pre.terminals().iter().map(|t| &t.demand)), || format!("instance {i}: property 2 fails"))?;
        // Property 3 from containment alone: every set weighs at most half of
        // its smallest strict superset in the family (universe included).
        let mut family: BTreeSet<PacketSet> = pre.terminals().iter().map(|t| t.demand.clone()).collect();
        family.insert(pre.universe().all());
        for x in &family {
            let parent = family.iter().filter(|y| x.is_subset(y) && *y != x).min_by_key(|y| y.len());
            if let Some(y) = parent {
                ensure(weight(&pre, y) >= 2 * weight(&pre, x), || format!("instance {i}: property 3 fails"))?;
            }
        }
        // Property 5: paths valid for the new demands are valid for the old ones.
        let mut sol = RandSolution::new();
        let spt = raw.graph().shortest_paths_from(raw.source());
        for t in raw.terminals() {
            sol.insert(t.id, spt.path_to_source(t.node).expect("connected"));
        }
        ensure(eval_rand_cost(&sol, &pre).is_ok() && eval_rand_cost(&sol, &raw).is_ok(), || format!("instance {i}: property 5 fails"))?;
        ensure(preprocess(&pre) == pre, || format!("instance {i}: not idempotent"))?;
    }
    Ok("1000 instances".into())
}

/// Criterion 2: heavy-path chain decomposition.
fn chains() -> Check {
    let mut r = rng(102);
    let mut done = 0;
    let mut max_p = 0;
    let mut large = 0;
    while done < 1000 {
        let cfg = GeneratorConfig {
            seed: r.random(),
            nodes: 2,
            terminals: r.random_range(1..=120),
            packets: r.random_range(1..=128),
            branching: r.random_range(1..5),
            weight: (1, r.random_range(1..4)),
            ..Default::default()
        };
        let pre = preprocess(&generate_rand(&cfg).map_err(|e| e.to_string())?);
        let tree = DemandTree::build(&pre);
        if tree.len() > 64 {
            continue;
        }
        done += 1;
        max_p = max_p.max(tree.len());
        large += usize::from(tree.len() > 32);
        let collections = decompose_chains(&tree);
        let limit = (usize::BITS - 1 - tree.len().leading_zeros()) as usize + 1;
        ensure(collections.len() <= limit, || format!("P = {}: {} collections", tree.len(), collections.len()))?;
        let mut seen = vec![0u32; tree.len()];
        for c in &collections {
            let mut used = PacketSet::new();
            for chain in &c.chains {
                let union: PacketSet = chain.nodes.iter().flat_map(|&x| tree.node(x).set.iter().copied()).collect();
                ensure(used.is_disjoint(&union), || "chains of one collection share packets".into())?;
                used.extend(union);
                for w in chain.nodes.windows(2) {
                    let (a, b) = (tree.node(w[0]), tree.node(w[1]));
                    ensure(b.set.is_subset(&a.set) && a.weight >= 2 * b.weight, || "chain weights do not halve".into())?;
                }
                for &x in &chain.nodes {
                    seen[x] += 1;
                }
            }
        }
        ensure(seen.iter().all(|&k| k == 1), || "a node is not in exactly one chain".into())?;
    }
    Ok(format!("1000 trees, largest P = {max_p}, {large} with P > 32"))
}

/// Criterion 3: the MST heuristic is within twice the exact Steiner cost.
fn steiner() -> Check {
    let mut r = rng(103);
    let mut worst = q(1);
    for i in 0..200 {
        let n = r.random_range(2..=8);
        let cfg = GeneratorConfig { seed: r.random(), nodes: n, density: r.random_range(0.0..0.8), cost: (1, 12), ..Default::default() };
        let inst = generate_rand(&cfg).map_err(|e| e.to_string())?;
        let g = inst.graph();
        let mut required: Vec<NodeId> = (0..n).filter(|_| r.random_bool(0.5)).collect();
        if required.len() < 2 {
            required = vec![0, n - 1];
        }
        let exact = exact_steiner(g, &required, DEFAULT_EXACT_CAP).map_err(|e| e.to_string())?;
        let approx = approx_steiner(g, &required).map_err(|e| e.to_string())?;
        ensure(exact.cost == steiner_brute(g, &required), || format!("graph {i}: exact Steiner is not optimal"))?;
        ensure(approx.cost <= q(2) * exact.cost.clone(), || format!("graph {i}: ratio above 2"))?;
        if !is_zero(&exact.cost) {
            worst = worst.max(approx.cost / exact.cost);
        }
    }
    Ok(format!("200 graphs, worst ratio {worst} (~{:.4})", worst.approx_f64()))
}

fn small_rand_instances(seed: u64, count: usize, max_p: usize) -> Result<Vec<RandInstance<Rational>>, String> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let cfg = small_config(&mut r, 8, 4, 6);
        let inst = generate_rand(&cfg).map_err(|e| e.to_string())?;
        if DemandTree::build(&inst).len() > max_p || oracle_rand(&inst, DEFAULT_CAP).is_err() {
            continue;
        }
        out.push(inst);
    }
    Ok(out)
}

fn summary(mut ratios: Vec<f64>) -> String {
    ratios.sort_by(f64::total_cmp);
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let optimal = ratios.iter().filter(|&&x| x == 1.0).count();
    format!(
        "min {:.3} median {:.3} mean {:.3} max {:.3}, optimal in {optimal}/{}",
        ratios[0],
        ratios[ratios.len() / 2],
        mean,
        ratios[ratios.len() - 1],
        ratios.len()
    )
}

/// Criterion 4: end-to-end RAND ratios.
fn rand_ratio() -> Check {
    let instances = small_rand_instances(104, 200, 4)?;
    let mut report = Vec::new();
    for (variant, name) in [(Variant::PerNodeSteiner, "steiner"), (Variant::Prim, "prim")] {
        let mut ratios = Vec::new();
        for (i, inst) in instances.iter().enumerate() {
            let opt = oracle_rand(inst, DEFAULT_CAP).map_err(|e| e.to_string())?.cost;
            let out = solve_rand_end_to_end(inst, &RandConfig { variant, ..Default::default() }).map_err(|e| e.to_string())?;
            let p = DemandTree::build(inst).len();
            let levels = log_levels(p) as i64;
            // 4 alpha levels with alpha = 2 for the MST routine; 8 levels for Prim.
            let bound = q(8 * levels);
            let cost = rand_cost(inst, &out.solution);
            ensure(cost == out.cost, || format!("{name} instance {i}: reported cost differs"))?;
            ensure(cost >= opt && cost <= bound * opt.clone(), || format!("{name} instance {i}: cost {cost} vs optimum {opt}"))?;
            ratios.push(if is_zero(&opt) { 1.0 } else { (cost / opt).approx_f64() });
        }
        report.push(format!("{name}: {}", summary(ratios)));
    }
    Ok(format!("200 instances; {}", report.join("; ")))
}

/// Criterion 5: each chain collection costs at most twice the optimum.
fn chain_cost() -> Check {
    let instances = small_rand_instances(105, 100, usize::MAX)?;
    let mut worst = 0.0f64;
    let mut collections_seen = 0;
    for (i, raw) in instances.iter().enumerate() {
        let pre = preprocess(raw);
        let opt = oracle_rand(&pre, DEFAULT_CAP).map_err(|e| e.to_string())?.cost;
        let tree = DemandTree::build(&pre);
        let mut nodes_of: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
        for t in pre.terminals() {
            nodes_of.entry(tree.node_of(t.id).expect("terminal in tree")).or_default().push(t.node);
        }
        for c in decompose_chains(&tree) {
            collections_seen += 1;
            let mut total = q(0);
            for x in c.nodes() {
                if let Some(nodes) = nodes_of.get(&x) {
                    let mut req = nodes.clone();
                    req.push(pre.source());
                    total += q(tree.node(x).weight as i64) * steiner_brute(pre.graph(), &req);
                }
            }
            ensure(total <= q(2) * opt.clone(), || format!("instance {i}: collection costs {total}, optimum {opt}"))?;
            if !is_zero(&opt) {
                worst = worst.max((total / opt.clone()).approx_f64());
            }
        }
    }
    Ok(format!("100 instances, {collections_seen} collections, worst collection/optimum {worst:.3}"))
}

fn rafl_instances() -> Result<Vec<RaflInstance<Rational>>, String> {
    let mut r = rng(106);
    let mut out: Vec<_> = (0..200)
        .map(|_| {
            // Expensive facilities against cheap edges, so that sharing matters.
            let mut cfg = small_config(&mut r, 10, 6, 5);
            cfg.terminals = r.random_range(2..=6);
            cfg.facilities = r.random_range(2..=5);
            cfg.lambda = (1, r.random_range(2..=20));
            cfg.cost = (1, r.random_range(1..=4));
            generate_rafl(&cfg).map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    out.push(cycle_gap_instance()?);
    Ok(out)
}

fn cycle_gap_instance() -> Result<RaflInstance<Rational>, String> {
    // Terminals on nodes 0..3, facilities on nodes 3..6.
    let edges = (0..3).flat_map(|i| [(3 + i, i, q(1)), (3 + i, (i + 1) % 3, q(1))]);
    let graph = WeightedGraph::new(6, edges).map_err(|e| e.to_string())?;
    let universe = PacketUniverse::new([(PacketId(0), 1)]).map_err(|e| e.to_string())?;
    let terminals = (0..3).map(|i| Terminal { id: TerminalId(i as u32), node: i, demand: [PacketId(0)].into() }).collect();
    let facilities = (0..3).map(|i| Facility { id: FacilityId(i as u32), node: 3 + i, lambda: q(2) }).collect();
    RaflInstance::new(graph, universe, terminals, facilities).map_err(|e| e.to_string())
}

/// Criterion 6: LP value never exceeds the integral optimum.
fn lp_soundness(instances: &[RaflInstance<Rational>]) -> Check {
    let mut gap = 0.0f64;
    for (i, inst) in instances.iter().enumerate() {
        let opt = oracle_rafl(inst, DEFAULT_CAP).map_err(|e| e.to_string())?.cost;
        let exact = solve_rafl_lp(inst).map_err(|e| e.to_string())?;
        ensure(exact.objective <= opt, || format!("instance {i}: LP {} above optimum {opt}", exact.objective))?;
        let float = solve_rafl_lp(&to_f64_rafl(inst)).map_err(|e| e.to_string())?;
        ensure(float.objective <= opt.approx_f64() + 1e-6, || format!("instance {i}: float LP above optimum"))?;
        gap = gap.max((opt / exact.objective).approx_f64());
    }
    // Three facilities each next to two of three terminals: the LP opens every
    // facility halfway (value 6) while any integral choice costs 7.
    let cycle = cycle_gap_instance()?;
    let lp = solve_rafl_lp(&cycle).map_err(|e| e.to_string())?.objective;
    let opt = oracle_rafl(&cycle, DEFAULT_CAP).map_err(|e| e.to_string())?.cost;
    ensure(lp == q(6) && opt == q(7), || format!("cycle instance: LP {lp}, optimum {opt}"))?;
    Ok(format!("{} instances, largest optimum/LP gap {gap:.3}; cycle instance LP {lp} < optimum {opt}", instances.len()))
}

/// Criterion 7: rounding bounds at alpha = 3, recomputed from the run's parts.
fn rafl_bounds(instances: &[RaflInstance<Rational>]) -> Check {
    let alpha = q(3);
    let mut ratios = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let run = solve_rafl_detailed(inst, &alpha).map_err(|e| e.to_string())?;
        let norm = &run.normalized;
        let d = floyd(norm.graph());
        let dist = |t: usize, f: usize| d[norm.terminals()[t].node][norm.facilities()[f].node].clone().expect("connected");
        let w = |set: &PacketSet| q(norm.universe().total_weight(set) as i64);
        let nf = norm.facilities().len();

        // (a) routing per terminal against C_r*(t) of the LP optimum.
        for t in 0..norm.terminals().len() {
            let c_r: Rational = (0..nf).map(|f| run.lp.x[t][f].clone() * dist(t, f)).sum();
            let a = dist(t, run.opening.facility[t]);
            ensure(a <= q(9) * alpha.clone() * c_r.clone(), || format!("instance {i}: terminal {t} routes {a}, C_r* {c_r}"))?;
        }
        // (b) copy-accounted facility cost against C_f*.
        let c_f: Rational = (0..nf)
            .map(|f| {
                norm.facilities()[f].lambda.clone()
                    * norm.universe().iter().enumerate().map(|(p, (_, wp))| run.lp.y[f][p].clone() * q(wp as i64)).sum::<Rational>()
            })
            .sum();
        let lambda = |f: usize| norm.facilities()[f].lambda.clone();
        let mut copy_cost: Rational = run.opening.copies.iter().map(|c| lambda(c.facility) * w(&c.charged)).sum();
        for t in 0..norm.terminals().len() {
            if run.classes.class[t] == Class::Paying {
                copy_cost += lambda(run.opening.facility[t]) * w(&norm.terminals()[t].demand);
            }
        }
        let bound_b = q(18) * alpha.clone() / (alpha.clone() - q(1)) * c_f.clone();
        ensure(copy_cost <= bound_b, || format!("instance {i}: copy facility cost {copy_cost} above {bound_b}"))?;
        let merged = redund::model::eval_rafl_cost(&run.assignment, norm).map_err(|e| e.to_string())?;
        ensure(merged.facility <= copy_cost, || format!("instance {i}: merged facility cost above copy accounting"))?;
        // (c) total against the LP value and the optimum, in input units.
        let cost = rafl_cost(inst, &run.assignment);
        let lp_value = (c_f
            + (0..norm.terminals().len())
                .map(|t| w(&norm.terminals()[t].demand) * (0..nf).map(|f| run.lp.x[t][f].clone() * dist(t, f)).sum::<Rational>())
                .sum::<Rational>())
            * run.scale.clone();
        let opt = oracle_rafl(inst, DEFAULT_CAP).map_err(|e| e.to_string())?.cost;
        ensure(cost <= q(27) * lp_value.clone(), || format!("instance {i}: cost {cost} above 27 x LP {lp_value}"))?;
        ensure(lp_value <= opt, || format!("instance {i}: LP above optimum"))?;
        ensure(run.certificate.all_hold(), || format!("instance {i}: certificate check failed"))?;
        ratios.push((cost / opt).approx_f64());
    }
    Ok(format!("{} instances; cost/optimum {}", instances.len(), summary(ratios)))
}

/// Criterion 8: every command twice with the same flags, byte for byte.
fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_str().expect("utf-8 path").to_string();
    let bin = env!("CARGO_BIN_EXE_redund");
    let run = |args: &[String]| -> Result<(Vec<u8>, Vec<u8>), String> {
        let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
        }
        Ok((out.stdout, out.stderr))
    };
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let (rand_inst, rafl_inst, rand_sol, rafl_sol) = (p("rand.txt"), p("rafl.txt"), p("rand.sol"), p("rafl.sol"));
    let commands: Vec<Vec<String>> = vec![
        s(&["gen", "--problem", "rand", "--seed", "11", "--nodes", "30", "--terminals", "12", "--packets", "10"]),
        s(&["gen", "--problem", "rand", "--seed", "12", "--nodes", "7", "--terminals", "4", "--out", &rand_inst]),
        s(&["gen", "--problem", "rafl", "--seed", "13", "--nodes", "8", "--terminals", "5", "--out", &rafl_inst]),
        s(&["solve", &rand_inst, "--variant", "steiner", "--out", &rand_sol]),
        s(&["solve", &rand_inst, "--variant", "steiner", "--steiner", "exact"]),
        s(&["solve", &rand_inst, "--variant", "prim"]),
        s(&["solve", &rafl_inst, "--alpha", "3", "--certificate", "--out", &rafl_sol]),
        s(&["solve", &rafl_inst, "--float"]),
        s(&["oracle", &rand_inst]),
        s(&["oracle", &rafl_inst]),
        s(&["eval", &rand_inst, &rand_sol]),
        s(&["eval", &rafl_inst, &rafl_sol]),
        s(&["ratio", &rand_inst, "--variant", "prim"]),
        s(&["ratio", &rafl_inst]),
        s(&["bench", "--count", "3", "--seed", "5"]),
    ];
    for cmd in &commands {
        let first = run(cmd)?;
        let second = run(cmd)?;
        ensure(first == second, || format!("{cmd:?} differs between runs"))?;
    }
    let sol_text = std::fs::read(Path::new(&rafl_sol)).map_err(|e| e.to_string())?;
    ensure(!sol_text.is_empty(), || "no solution written".into())?;
    Ok(format!("{} commands", commands.len()))
}

/// Criterion 9: Prim variant at n = 1000, |T| = 200, P = 50.
fn prim_performance() -> Check {
    let mut found = None;
    for seed in 0..2000u64 {
        let cfg = GeneratorConfig {
            seed,
            nodes: 1000,
            density: 0.004,
            terminals: 200,
            packets: 400,
            branching: 3,
            weight: (1, 3),
            cost: (1, 20),
            ..Default::default()
        };
        let pre = preprocess(&generate_rand(&cfg).map_err(|e| e.to_string())?);
        if DemandTree::build(&pre).len() == 50 {
            found = Some((seed, pre));
            break;
        }
    }
    let (seed, inst) = found.ok_or("no generated instance with P = 50")?;
    let start = Instant::now();
    let sol = solve_rand_prim(&inst).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let cost = eval_rand_cost(&sol, &inst).map_err(|e| e.to_string())?;
    ensure(elapsed < Duration::from_secs(5), || format!("solve took {:.2}s", elapsed.as_secs_f64()))?;
    Ok(format!("seed {seed}, {} edges, solve {:.2}s, cost ~{:.1}", inst.graph().edge_count(), elapsed.as_secs_f64(), cost.approx_f64()))
}

fn main() {
    let secs = Duration::from_secs;
    let mut results = vec![
        criterion(1, "preprocessing", secs(10), preprocessing),
        criterion(2, "chain decomposition", secs(5), chains),
        criterion(3, "steiner ratio", secs(30), steiner),
        criterion(4, "rand end-to-end ratio", secs(120), rand_ratio),
        criterion(5, "chain collection cost", secs(120), chain_cost),
    ];
    let instances = rafl_instances();
    match instances {
        Ok(instances) => {
            results.push(criterion(6, "rafl lp soundness", secs(60), || lp_soundness(&instances)));
            results.push(criterion(7, "rafl rounding bounds", secs(120), || rafl_bounds(&instances)));
        }
        Err(e) => {
            println!("criterion 6 [rafl lp soundness]: FAIL {e}");
            println!("criterion 7 [rafl rounding bounds]: FAIL {e}");
            results.extend([false, false]);
        }
    }
    results.push(criterion(8, "determinism", secs(60), determinism));
    // The time limit applies to the solve itself; instance search is excluded.
    results.push(criterion(9, "prim performance", secs(600), prim_performance));
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
