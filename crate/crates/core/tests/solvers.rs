mod common;

use std::collections::BTreeSet;

use common::*;
use rand::Rng;
use redund::lp::solve_rafl_lp;
use redund::model::{eval_rafl_cost, eval_rand_cost, NodeId};
use redund::oracle::{oracle_rafl, oracle_rand, DEFAULT_CAP};
use redund::rafl_solver::{classify, covers, filter, solve_rafl_detailed, Class};
use redund::rand_solver::{solve_rand_end_to_end, RandConfig, Variant};
use redund::steiner::{approx_steiner, exact_steiner, DEFAULT_EXACT_CAP};
use redund::toolkit::{generate_rafl, generate_rand, to_f64_rafl};

#[test]
fn steiner_solvers_against_enumeration() {
    let mut r = rng(21);
    for _ in 0..150 {
        let inst = generate_rand(&small_config(&mut r, 8, 4, 2)).unwrap();
        let g = inst.graph();
        let n = g.node_count();
        let k = r.random_range(1..=n);
        let required: Vec<NodeId> = (0..n).filter(|_| r.random_bool(k as f64 / n as f64)).collect();
        if required.is_empty() {
            continue;
        }
        let best = steiner_brute(g, &required);
        let exact = exact_steiner(g, &required, DEFAULT_EXACT_CAP).unwrap();
        let approx = approx_steiner(g, &required).unwrap();
        assert_eq!(exact.cost, best);
        assert!(approx.cost >= best);
        assert!(approx.cost <= q(2) * best);
    }
}

#[test]
fn oracles_match_plain_enumeration() {
    let mut r = rng(22);
    for _ in 0..60 {
        let inst = generate_rand(&small_config(&mut r, 6, 3, 3)).unwrap();
        let res = oracle_rand(&inst, DEFAULT_CAP).unwrap();
        assert_eq!(res.cost, rand_brute(&inst));
        assert_eq!(eval_rand_cost(&res.solution, &inst).unwrap(), res.cost);
    }
    for _ in 0..60 {
        let inst = generate_rafl(&small_config(&mut r, 7, 4, 4)).unwrap();
        let res = oracle_rafl(&inst, DEFAULT_CAP).unwrap();
        assert_eq!(res.cost, rafl_brute(&inst));
        assert_eq!(eval_rafl_cost(&res.solution, &inst).unwrap().total(), res.cost);
    }
}

#[test]
fn rand_solvers_never_beat_the_oracle() {
    let mut r = rng(23);
    for _ in 0..80 {
        let inst = generate_rand(&small_config(&mut r, 7, 4, 4)).unwrap();
        // The oracle is cross-checked against plain enumeration above.
        let opt = oracle_rand(&inst, DEFAULT_CAP).unwrap().cost;
        for variant in [Variant::PerNodeSteiner, Variant::Prim] {
            let out = solve_rand_end_to_end(&inst, &RandConfig { variant, ..Default::default() }).unwrap();
            assert_eq!(out.cost, rand_cost(&inst, &out.solution));
            assert!(out.cost >= opt);
            assert!(out.cost <= q(out.stats.bound_factor as i64) * opt.clone());
        }
    }
}

#[test]
fn lp_is_a_lower_bound() {
    let mut r = rng(24);
    for _ in 0..100 {
        let mut cfg = small_config(&mut r, 6, 3, 3);
        cfg.facilities = 3;
        let inst = generate_rafl(&cfg).unwrap();
        let lp = solve_rafl_lp(&inst).unwrap();
        assert!(lp.is_feasible(&inst));
        assert!(lp.objective <= rafl_brute(&inst));
        let float = solve_rafl_lp(&to_f64_rafl(&inst)).unwrap();
        assert!((float.objective - redund::Scalar::approx_f64(&lp.objective)).abs() <= 1e-6);
    }
}

#[test]
fn rafl_rounding_invariants() {
    let mut r = rng(25);
    for _ in 0..150 {
        let inst = generate_rafl(&small_config(&mut r, 8, 5, 5)).unwrap();
        let run = solve_rafl_detailed(&inst, &q(3)).unwrap();
        let cert = &run.certificate;
        assert!(cert.all_hold(), "{:?}", cert.failures().collect::<Vec<_>>());
        let cost = rafl_cost(&inst, &run.assignment);
        assert_eq!(cost, cert.cost.total());
        let opt = rafl_brute(&inst);
        assert!(cost >= opt);
        assert!(cost <= q(27) * cert.lp_value.clone());
        assert!(cert.lp_value <= opt);

        // Classification post-conditions, checked from the definitions.
        let norm = &run.normalized;
        let cs = &run.classes;
        let fs = &run.filtered;
        let mut prev = None;
        for &t in &cs.order {
            if let Some(p) = prev {
                assert!(fs.lp_routing[p] <= fs.lp_routing[t]);
            }
            prev = Some(t);
        }
        for t in 0..norm.terminals().len() {
            let demand = &norm.terminals()[t].demand;
            match cs.class[t] {
                Class::Free => {
                    let f = cs.temporary[t].unwrap();
                    assert!(fs.support[t].contains(&f));
                    assert!(!cs.cover[t].is_empty());
                    assert!(cs.cover[t].iter().all(|j| cs.pay[f].contains(j)));
                    let union: BTreeSet<_> = cs.cover[t].iter().flat_map(|&j| norm.terminals()[j].demand.iter().copied()).collect();
                    let residual: u64 = demand.difference(&union).map(|p| norm.universe().weight(*p).unwrap()).sum();
                    let total: u64 = demand.iter().map(|p| norm.universe().weight(*p).unwrap()).sum();
                    assert!(2 * residual < total);
                    assert!(covers(norm.universe(), cs.cover[t].iter().map(|&j| &norm.terminals()[j].demand), demand));
                    assert_eq!(cs.level[t], cs.cover[t].iter().map(|&j| cs.level[j]).min().unwrap());
                }
                Class::Paying => {
                    for &f in &fs.support[t] {
                        assert!(cs.pay[f].contains(&t));
                    }
                    // 2^(l-1) < C_f(t) <= 2^l, with l clamped at zero.
                    let l = cs.level[t];
                    assert!(fs.opening[t] <= q(1i64 << l));
                    if l > 0 {
                        assert!(fs.opening[t] > q(1i64 << (l - 1)));
                    }
                }
            }
        }
    }
}

#[test]
fn filtering_keeps_only_close_facilities() {
    let mut r = rng(26);
    for _ in 0..100 {
        let inst = generate_rafl(&small_config(&mut r, 8, 5, 5)).unwrap();
        let lp = solve_rafl_lp(&inst).unwrap();
        for alpha in [q(2), q(3), q(5)] {
            let fs = filter(&lp, &inst, &alpha).unwrap();
            for t in 0..inst.terminals().len() {
                assert_eq!(fs.x[t].iter().fold(q(0), |a, v| a + v), q(1));
                for &f in &fs.support[t] {
                    assert!(*inst.distance(t, f) <= alpha.clone() * fs.lp_routing[t].clone());
                }
            }
            let bound = alpha.clone() / (alpha.clone() - q(1)) * lp.facility_cost(&inst);
            assert!(fs.facility_cost(&inst) <= bound);
            let cs = classify(&fs, &inst);
            assert_eq!(cs.paying().count() + cs.free().count(), inst.terminals().len());
        }
    }
}
