//! The acceptance suite: ten criteria, one `PASS`/`FAIL` line each. Runs
//! without the libtest harness so the lines always show; exits nonzero if
//! any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use mpg_duel::asymptotic::{
    product_max_mean_cycle, subadditive_constant, value_alt_infinite, value_nonalt_bounds, ValueBounds,
};
use mpg_duel::codes::{asymptotic_covering_radius_bounds, brute_covering_radius, covering_radius, ForbiddenSet};
use mpg_duel::error::Error;
use mpg_duel::finite::{
    brute_values_with_limit, nonalt_values_upto, value_alt_finite, value_nonalt_finite, SearchOptions,
};
use mpg_duel::gallery::{
    better_branch_average, bob_branches, build_example, nonperiodic_walk, periodic_limit_average, periodic_sweep,
    PeriodicWalk, SIMULATION_STEPS,
};
use mpg_duel::graph::{DirectedGraph, EdgeSpec};
use mpg_duel::instance::{GameInstance, Score, ScoreSpec, StartSpec};
use mpg_duel::strategy::{alice_equilibrium_stream, bob_equilibrium_response, final_average, CyclicWalk};
use mpg_duel::structure::product_component_at;
use mpg_duel::value::Value;
use rand::seq::SliceRandom;
use rand::Rng;

struct Outcome {
    id: u32,
    title: &'static str,
    ok: bool,
    detail: String,
}

fn report(id: u32, title: &'static str, ok: bool, detail: &str) -> Outcome {
    Outcome { id, title, ok, detail: detail.to_string() }
}

type Criterion = fn() -> Outcome;

const CRITERIA: [(u32, Criterion); 10] = [
    (1, c01_reducible_finite_values_and_switch_times),
    (2, c02_chase_gap),
    (3, c03_non_alternating_never_exceeds_alternating),
    (4, c04_solvers_match_brute_force),
    (5, c05_subadditivity_audit),
    (6, c06_single_cycle_bob),
    (7, c07_equilibrium_trace),
    (8, c08_covering_radius),
    (9, c09_periodic_strategies_lose),
    (10, c10_component_invariance),
];

fn main() {
    // independent criteria run concurrently; lines print in order
    let outcomes: Vec<Outcome> = std::thread::scope(|scope| {
        let handles: Vec<_> = CRITERIA
            .iter()
            .map(|&(id, run)| (id, scope.spawn(run)))
            .collect();
        handles
            .into_iter()
            .map(|(id, h)| {
                h.join().unwrap_or_else(|e| {
                    let msg = e
                        .downcast_ref::<String>()
                        .cloned()
                        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_default();
                    Outcome { id, title: "panicked", ok: false, detail: msg }
                })
            })
            .collect()
    });
    for o in &outcomes {
        println!("acceptance {:>2} {}: {}: {}", o.id, if o.ok { "PASS" } else { "FAIL" }, o.title, o.detail);
    }
    let failed = outcomes.iter().filter(|o| !o.ok).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn vstart(inst: &GameInstance, v: usize, u: usize) -> StartSpec {
    StartSpec::vertices(inst.graph_g.vertex_name(v), inst.graph_h.vertex_name(u))
}

fn c01_reducible_finite_values_and_switch_times() -> Outcome {
    let e = build_example("fig2").unwrap();
    let inst = &e.instance;
    let values = nonalt_values_upto(inst, 24, &e.start, SearchOptions::default()).unwrap();
    let (one, minus_one) = (Value::integer(1), Value::integer(-1));
    let finite_ok = (1..=24).all(|n| {
        let v = &values[n];
        minus_one <= *v && *v <= one && v.abs().to_f64() / n as f64 <= 2.0 / n as f64
    });

    let g = &inst.graph_g;
    let (plus, zero, minus) = (
        g.edge_by_id("e+").unwrap(),
        g.edge_by_id("e0").unwrap(),
        g.edge_by_id("e-").unwrap(),
    );
    let branches = bob_branches(&e).unwrap();
    let mut alice: Vec<PeriodicWalk> = (1..=50)
        .map(|t| PeriodicWalk {
            prefix: std::iter::repeat_n(plus, t - 1).chain([zero]).collect(),
            cycle: vec![minus],
        })
        .collect();
    alice.push(PeriodicWalk { prefix: vec![], cycle: vec![plus] });
    let limits: BTreeSet<String> = alice
        .iter()
        .map(|a| {
            branches
                .iter()
                .map(|b| periodic_limit_average(inst, a, b))
                .reduce(Value::min)
                .unwrap()
                .to_string()
        })
        .collect();
    let infinite_ok = limits.len() == 1 && limits.contains("-1");
    report(
        1,
        "reducible example: finite values in [-1,1], infinite value -1",
        finite_ok && infinite_ok,
        &format!(
            "V(1..24) = {}; limits over T in 1..50 and never: {limits:?}",
            values[1..].iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        ),
    )
}

fn c02_chase_gap() -> Outcome {
    let clock = Instant::now();
    let e = build_example("chase").unwrap();
    let mut ok = true;
    let mut rows = Vec::new();
    for n in 1..=10 {
        let alt = value_alt_finite(&e.instance, n, &e.start).unwrap();
        let non = value_nonalt_finite(&e.instance, n, &e.start).unwrap().value;
        ok &= alt == Value::integer(n as i64)
            && non <= Value::integer(2)
            && alt.minus(&non) >= Value::integer(n as i64 - 2);
        rows.push(format!("{n}:{alt}/{non}"));
    }
    let inf = value_alt_infinite(&e.instance, &e.start, None).unwrap();
    ok &= inf.bounds.exact == Some(Value::integer(1));
    let secs = clock.elapsed().as_secs_f64();
    ok &= secs <= 60.0;
    report(
        2,
        "chase: alternating n, non-alternating at most 2, mean payoff 1",
        ok,
        &format!("alt/non-alt {}; infinite {:?}; {secs:.1}s", rows.join(" "), inf.bounds.exact.map(|v| v.to_string())),
    )
}

/// The 100-instance suite shared by criteria 3 and 4.
fn small_suite() -> Vec<(GameInstance, StartSpec)> {
    let mut rng = common::rng(3);
    (0..100)
        .map(|_| {
            let g = common::sink_free(&mut rng, "G", 3, 6);
            let h = common::sink_free(&mut rng, "H", 3, 6);
            let inst = common::with_scores(&mut rng, g, h, 3);
            let v = rng.gen_range(0..inst.graph_g.vertex_count());
            let u = rng.gen_range(0..inst.graph_h.vertex_count());
            let start = vstart(&inst, v, u);
            (inst, start)
        })
        .collect()
}

fn c03_non_alternating_never_exceeds_alternating() -> Outcome {
    let mut violations = 0;
    let mut checked = 0;
    for (inst, start) in small_suite() {
        for n in 0..=6 {
            let non = value_nonalt_finite(&inst, n, &start).unwrap().value;
            let alt = value_alt_finite(&inst, n, &start).unwrap();
            checked += 1;
            if non > alt {
                violations += 1;
            }
        }
    }
    report(
        3,
        "non-alternating value at most alternating value",
        violations == 0,
        &format!("{violations} violations in {checked} (instance, n) pairs"),
    )
}

fn c04_solvers_match_brute_force() -> Outcome {
    // a few suite instances exceed the default enumeration guard at n = 6
    const LIMIT: u128 = 1_000_000_000;
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for (i, (inst, start)) in small_suite().into_iter().enumerate() {
        for n in 0..=6 {
            let (bn, ba) = brute_values_with_limit(&inst, n, &start, LIMIT).unwrap();
            let non = value_nonalt_finite(&inst, n, &start).unwrap().value;
            let alt = value_alt_finite(&inst, n, &start).unwrap();
            checked += 1;
            if non != bn || alt != ba {
                mismatches.push(format!("#{i} n={n}"));
            }
        }
    }
    report(
        4,
        "pruned search and backward induction match enumeration",
        mismatches.is_empty(),
        &format!("{} mismatches in {checked} pairs {mismatches:?}", mismatches.len()),
    )
}

fn irreducible_instance(rng: &mut rand_chacha::ChaCha8Rng) -> GameInstance {
    let ng = rng.gen_range(1..=3);
    let nh = rng.gen_range(1..=3);
    let g = common::irreducible(rng, "G", ng, 6);
    let h = common::irreducible(rng, "H", nh, 6);
    common::with_scores(rng, g, h, 3)
}

/// A start in a nontrivial product component.
fn recurrent_start(inst: &GameInstance, rng: &mut rand_chacha::ChaCha8Rng) -> StartSpec {
    let mut pairs: Vec<(usize, usize)> = (0..inst.graph_g.vertex_count())
        .flat_map(|v| (0..inst.graph_h.vertex_count()).map(move |u| (v, u)))
        .collect();
    pairs.shuffle(rng);
    for (v, u) in pairs {
        if product_component_at(&inst.graph_g, &inst.graph_h, v, u).is_ok() {
            return vstart(inst, v, u);
        }
    }
    unreachable!("a product of strongly connected graphs has a cycle through every pair's component")
}

fn c05_subadditivity_audit() -> Outcome {
    let mut rng = common::rng(5);
    let mut violations = Vec::new();
    let mut escalated = 0;
    for i in 0..30 {
        let inst = irreducible_instance(&mut rng);
        let start = recurrent_start(&inst, &mut rng);
        let b = value_nonalt_bounds(&inst, &start, 12).unwrap();
        let c = b.audit.constant;
        if !b.audit.escalations.is_empty() {
            escalated += 1;
        }
        let r = &b.values;
        for n in 1..12 {
            for m in 1..=12 - n {
                if r[n + m] > r[n].plus(&r[m]).plus(&c) {
                    violations.push(format!("#{i} n={n} m={m}"));
                }
            }
        }
    }
    report(
        5,
        "r(n+m) <= r(n) + r(m) + C for n+m <= 12",
        violations.is_empty(),
        &format!("{} residual violations {violations:?}; {escalated}/30 instances escalated C", violations.len()),
    )
}

fn c06_single_cycle_bob() -> Outcome {
    let mut rng = common::rng(6);
    let mut bad = Vec::new();
    for i in 0..20 {
        let (ng, nh) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let g = common::irreducible(&mut rng, "G", ng, 6);
        let h = common::cycle("H", nh);
        let inst = common::with_scores(&mut rng, g, h, 3);
        let start = recurrent_start(&inst, &mut rng);
        let alt = value_alt_infinite(&inst, &start, None).unwrap();
        let (mmc, _) = product_max_mean_cycle(&inst, &start).unwrap().unwrap();
        let b = value_nonalt_bounds(&inst, &start, 12).unwrap();
        let c = b.audit.constant.to_f64();
        let ok = alt.bounds.exact == Some(mmc)
            && b.bounds.contains(&mmc)
            && b.bounds.width() <= 2.0 * c / 12.0;
        if !ok {
            bad.push(format!(
                "#{i}: alt {:?} mmc {mmc} bounds [{}, {}]",
                alt.bounds.exact.map(|v| v.to_string()),
                b.bounds.lower,
                b.bounds.upper
            ));
        }
    }
    report(
        6,
        "single-cycle H: alternating value is the max mean cycle, bounds bracket it",
        bad.is_empty(),
        &format!("{} of 20 failed {bad:?}", bad.len()),
    )
}

/// Fixed 3x3 instance: both graphs a 3-cycle with a loop and a chord.
fn trace_instance() -> GameInstance {
    let g = DirectedGraph::new(
        "G",
        &["a", "b", "c"],
        vec![
            EdgeSpec::new("ab", "a", "b"),
            EdgeSpec::new("bc", "b", "c"),
            EdgeSpec::new("ca", "c", "a"),
            EdgeSpec::new("aa", "a", "a"),
            EdgeSpec::new("ba", "b", "a"),
        ],
    )
    .unwrap();
    let h = DirectedGraph::new(
        "H",
        &["x", "y", "z"],
        vec![
            EdgeSpec::new("xy", "x", "y"),
            EdgeSpec::new("yz", "y", "z"),
            EdgeSpec::new("zx", "z", "x"),
            EdgeSpec::new("zz", "z", "z"),
            EdgeSpec::new("yx", "y", "x"),
        ],
    )
    .unwrap();
    let mut spec = ScoreSpec::with_default(Score::integer(0));
    for (i, e) in g.edges().iter().enumerate() {
        for (j, f) in h.edges().iter().enumerate() {
            spec.set(&e.id, &f.id, Score::integer(((3 * i + 5 * j) % 7) as i64 - 3));
        }
    }
    GameInstance::new(g, h, spec).unwrap()
}

fn c07_equilibrium_trace() -> Outcome {
    let inst = trace_instance();
    let start = StartSpec::edges("ca", "zx");
    let bounds = value_nonalt_bounds(&inst, &start, 12).unwrap().bounds;
    let alice = alice_equilibrium_stream(&inst, &start).unwrap();
    let bob = bob_equilibrium_response(&inst, &start).unwrap();
    let horizon = alice.schedule().b(20);
    let avg = final_average(&inst, alice, bob, horizon).unwrap().to_f64();
    let ok = bounds.lower.to_f64() - 0.05 <= avg && avg <= bounds.upper.to_f64() + 0.05;
    report(
        7,
        "block equilibrium trace lands near the bounds",
        ok,
        &format!("average {avg:.4} at step {horizon}; bounds [{}, {}]", bounds.lower, bounds.upper),
    )
}

fn c08_covering_radius() -> Outcome {
    let sets = [("", Some(1)), ("1", None), ("11", None), ("00,11", None)];
    let mut bad = Vec::new();
    let mut checked = 0;
    for (text, k) in sets {
        let f = ForbiddenSet::parse(text, k).unwrap();
        for n in 1..=12 {
            let brute = match brute_covering_radius(&f, n) {
                Ok(r) => r.radius,
                Err(Error::EmptyCode(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            let game = covering_radius(&f, n).unwrap().radius;
            checked += 1;
            if game != brute {
                bad.push(format!("F={{{text}}} n={n}: game {game} brute {brute}"));
            }
        }
    }
    let one = asymptotic_covering_radius_bounds(&ForbiddenSet::parse("1", None).unwrap(), 12).unwrap();
    let none = asymptotic_covering_radius_bounds(&ForbiddenSet::empty(1).unwrap(), 12).unwrap();
    let exact = |b: &ValueBounds, v: i64| b.lower == Value::integer(v) && b.upper == Value::integer(v);
    let ok = bad.is_empty() && exact(&one.bounds, 1) && exact(&none.bounds, 0);
    report(
        8,
        "covering radius: game equals brute force; asymptotic [1,1] and [0,0]",
        ok,
        &format!(
            "{checked} radii, mismatches {bad:?}; F={{1}} [{}, {}]; F={{}} [{}, {}]",
            one.bounds.lower, one.bounds.upper, none.bounds.lower, none.bounds.upper
        ),
    )
}

fn c09_periodic_strategies_lose() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for name in ["irrational", "integer"] {
        let e = build_example(name).unwrap();
        let sweep = periodic_sweep(&e, 4, 6, SIMULATION_STEPS).unwrap();
        let walk = nonperiodic_walk(name, SIMULATION_STEPS).unwrap();
        let [left, right] = bob_branches(&e).unwrap();
        let mut averages = Vec::new();
        for b in [left, right] {
            let a = final_average(&e.instance, CyclicWalk::finite(walk.edges.clone()), b.stream(), SIMULATION_STEPS)
                .unwrap()
                .to_f64();
            averages.push(a);
        }
        let better = better_branch_average(&e, || CyclicWalk::finite(walk.edges.clone()), SIMULATION_STEPS)
            .unwrap()
            .to_f64();
        ok &= sweep.worst <= -1e-3 && averages.iter().all(|a| a.abs() <= 1e-2) && better.abs() <= 1e-2;
        if name == "integer" {
            ok &= sweep.formula_agrees == Some(true);
        }
        details.push(format!(
            "{name}: {} periodic candidates, best {:.4}; non-periodic {averages:?}{}",
            sweep.candidates,
            sweep.worst,
            if name == "integer" { format!(", exact formula {:?}", sweep.formula_agrees) } else { String::new() }
        ));
    }
    report(9, "eventually periodic Alice streams lose, non-periodic walks break even", ok, &details.join("; "))
}

fn c10_component_invariance() -> Outcome {
    let mut rng = common::rng(10);
    let mut bad = Vec::new();
    let mut components = 0;
    for i in 0..10 {
        let inst = irreducible_instance(&mut rng);
        let (g, h) = (&inst.graph_g, &inst.graph_h);
        let mut seen = BTreeSet::new();
        for v in 0..g.vertex_count() {
            for u in 0..h.vertex_count() {
                let Ok(comp) = product_component_at(g, h, v, u) else { continue };
                if !seen.insert(comp.members.clone()) {
                    continue;
                }
                components += 1;
                let mut starts: Vec<(usize, usize)> = (0..g.edge_count())
                    .flat_map(|e| (0..h.edge_count()).map(move |f| (e, f)))
                    .filter(|&(e, f)| comp.contains(g.dst(e), h.dst(f)))
                    .collect();
                starts.shuffle(&mut rng);
                starts.truncate(5);
                let bounds: Vec<ValueBounds> = starts
                    .iter()
                    .map(|&(e, f)| {
                        let s = StartSpec::edges(&g.edge(e).id, &h.edge(f).id);
                        value_nonalt_bounds(&inst, &s, 12).unwrap().bounds
                    })
                    .collect();
                for x in &bounds {
                    for y in &bounds {
                        if !x.intersects(y) {
                            bad.push(format!("#{i}: [{}, {}] vs [{}, {}]", x.lower, x.upper, y.lower, y.upper));
                        }
                    }
                }
                let c = subadditive_constant(&inst, &comp).unwrap().constant;
                let tables: Vec<Vec<Value>> = comp
                    .members
                    .iter()
                    .map(|&(v, u)| nonalt_values_upto(&inst, 12, &vstart(&inst, v, u), SearchOptions::default()).unwrap())
                    .collect();
                for n in 0..=12 {
                    let hi = tables.iter().map(|t| t[n]).reduce(Value::max).unwrap();
                    let lo = tables.iter().map(|t| t[n]).reduce(Value::min).unwrap();
                    if hi.minus(&lo) > c {
                        bad.push(format!("#{i} n={n}: spread {} > C = {c}", hi.minus(&lo)));
                    }
                }
            }
        }
    }
    report(
        10,
        "bounds agree across a product component; finite spreads within C",
        bad.is_empty(),
        &format!("{components} components, {} failures {bad:?}", bad.len()),
    )
}

