//! Four worked example instances with executable expectation checklists,
//! and the non-periodic walks that defeat every eventually periodic strategy
//! in the last two of them.
//!
//! * `fig2`: reducible graphs where finite-horizon averages tend to 0 but the
//!   infinite game is worth -1.
//! * `chase`: Bob chases Alice on four vertices; alternating play is worth `n`,
//!   non-alternating play at most 2.
//! * `irrational`: scores `±1`, `±sqrt 2`; no eventually periodic equilibrium.
//! * `integer`: integer scores with the same obstruction.

use std::collections::BTreeSet;

use num_integer::lcm;
use num_rational::Rational64;
use num_traits::Signed;
use serde::Serialize;

use crate::asymptotic::value_alt_infinite;
use crate::error::{Error, Result};
use crate::finite::{nonalt_values_upto, value_alt_finite, value_nonalt_finite, SearchOptions};
use crate::graph::{DirectedGraph, EdgeSpec, Walk};
use crate::instance::{GameInstance, Score, ScoreSpec, StartSpec};
use crate::strategy::{final_average, CyclicWalk};
use crate::structure::is_irreducible;
use crate::value::Value;

pub const NAMES: [&str; 4] = ["fig2", "chase", "irrational", "integer"];

/// Steps simulated for the periodicity checks.
pub const SIMULATION_STEPS: usize = 100_000;

pub const ALPHA: f64 = 1.0;

pub fn beta() -> f64 {
    std::f64::consts::SQRT_2
}

#[derive(Debug, Clone)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub instance: GameInstance,
    pub start: StartSpec,
    pub reducible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed,
        detail: detail.into(),
    }
}

fn graph(name: &str, vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<DirectedGraph> {
    let specs = edges
        .iter()
        .map(|&(id, s, d)| EdgeSpec::new(id, s, d))
        .collect();
    DirectedGraph::new(name, vertices, specs)
}

/// `X <- Y -> Z` with a loop at each end; used by three of the examples.
fn fork(left: &str, right: &str, left_loop: &str, right_loop: &str) -> Result<DirectedGraph> {
    graph(
        "H",
        &["X", "Y", "Z"],
        &[
            (left, "Y", "X"),
            (right, "Y", "Z"),
            (left_loop, "X", "X"),
            (right_loop, "Z", "Z"),
        ],
    )
}

fn fig2() -> Result<GalleryEntry> {
    let g = graph(
        "G",
        &["P", "M"],
        &[("e+", "P", "P"), ("e0", "P", "M"), ("e-", "M", "M")],
    )?;
    let h = fork("f1", "f2", "f+", "f-")?;
    let mut spec = ScoreSpec::with_default(Score::integer(0));
    spec.set("e+", "f+", Score::integer(1));
    spec.set("e-", "f-", Score::integer(1));
    spec.set("e+", "f-", Score::integer(-1));
    spec.set("e-", "f+", Score::integer(-1));
    entry("fig2", g, h, spec, StartSpec::vertices("P", "Y"))
}

fn chase() -> Result<GalleryEntry> {
    let names = ["W", "X", "Y", "Z"];
    let missing = ["WY", "YW", "XZ", "ZX"];
    let mut all = Vec::new();
    for a in names {
        for b in names {
            all.push((format!("{a}{b}"), a, b));
        }
    }
    let g_edges: Vec<EdgeSpec> = all.iter().map(|(id, a, b)| EdgeSpec::new(id, *a, *b)).collect();
    let h_edges: Vec<EdgeSpec> = g_edges
        .iter()
        .filter(|e| !missing.contains(&e.id.as_str()))
        .cloned()
        .collect();
    let g = DirectedGraph::new("G", &names, g_edges)?;
    let h = DirectedGraph::new("H", &names, h_edges)?;
    let mut spec = ScoreSpec::with_default(Score::integer(1));
    for e in g.edges() {
        for f in h.edges() {
            if e.dst == f.dst {
                spec.set(&e.id, &f.id, Score::integer(-1));
            }
        }
    }
    entry("chase", g, h, spec, StartSpec::edges("WW", "WW"))
}

fn irrational() -> Result<GalleryEntry> {
    let g = graph("G", &["O"], &[("e+", "O", "O"), ("e-", "O", "O")])?;
    let h = fork("fa", "fb", "f-", "f+")?;
    let (a, b) = (ALPHA, beta());
    let mut spec = ScoreSpec::with_default(Score::Float(0.0));
    spec.set("e+", "f+", Score::Float(a));
    spec.set("e+", "f-", Score::Float(-a));
    spec.set("e-", "f-", Score::Float(b));
    spec.set("e-", "f+", Score::Float(-b));
    entry("irrational", g, h, spec, StartSpec::vertices("O", "Y"))
}

fn integer() -> Result<GalleryEntry> {
    let g = graph(
        "G",
        &["M", "P"],
        &[
            ("e-", "M", "M"),
            ("e+", "P", "P"),
            ("ea", "M", "P"),
            ("eb", "P", "M"),
        ],
    )?;
    let h = fork("fa", "fb", "f-", "f+")?;
    let mut spec = ScoreSpec::with_default(Score::integer(-1));
    spec.set("e+", "f+", Score::integer(1));
    spec.set("e-", "f-", Score::integer(1));
    entry("integer", g, h, spec, StartSpec::vertices("M", "Y"))
}

fn entry(
    name: &'static str,
    g: DirectedGraph,
    h: DirectedGraph,
    spec: ScoreSpec,
    start: StartSpec,
) -> Result<GalleryEntry> {
    let reducible = !(is_irreducible(&g) && is_irreducible(&h));
    let instance = GameInstance::new(g, h, spec)?.with_start(start.clone())?;
    Ok(GalleryEntry {
        name,
        instance,
        start,
        reducible,
    })
}

pub fn build_example(name: &str) -> Result<GalleryEntry> {
    match name {
        "fig2" => fig2(),
        "chase" => chase(),
        "irrational" => irrational(),
        "integer" => integer(),
        other => Err(Error::UnknownExample(other.to_string())),
    }
}

/// Prefix of the non-periodic walk with balanced edge frequencies.
///
/// `integer`: blocks `e-^j, ea, e+^j, eb` for `j = 1, 2, ...`.
/// `irrational`: the Sturmian sequence with `e+` density `beta / (alpha + beta)`.
pub fn nonperiodic_walk(name: &str, length: usize) -> Result<Walk> {
    let entry = build_example(name)?;
    let g = &entry.instance.graph_g;
    let id = |s: &str| g.edge_by_id(s);
    let mut edges = Vec::with_capacity(length);
    match name {
        "integer" => {
            let (minus, plus, up, down) = (id("e-")?, id("e+")?, id("ea")?, id("eb")?);
            let mut j = 1;
            while edges.len() < length {
                edges.extend(std::iter::repeat_n(minus, j));
                edges.push(up);
                edges.extend(std::iter::repeat_n(plus, j));
                edges.push(down);
                j += 1;
            }
            edges.truncate(length);
        }
        "irrational" => {
            let (plus, minus) = (id("e+")?, id("e-")?);
            let theta = beta() / (ALPHA + beta());
            for j in 1..=length {
                let step = (j as f64 * theta).floor() - ((j - 1) as f64 * theta).floor();
                edges.push(if step >= 1.0 { plus } else { minus });
            }
        }
        other => {
            return Err(Error::UnknownExample(format!(
                "{other} has no non-periodic walk"
            )))
        }
    }
    let walk = Walk::new(edges);
    walk.validate(g, Some(g.vertex(if name == "integer" { "M" } else { "O" })?))?;
    Ok(walk)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkStatistics {
    pub n: usize,
    #[serde(serialize_with = "as_string")]
    pub p_plus: Rational64,
    #[serde(serialize_with = "as_string")]
    pub p_minus: Rational64,
    #[serde(serialize_with = "as_string")]
    pub p_zero: Rational64,
}

fn as_string<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Edge classes for [`walk_statistics`], by edge index.
#[derive(Debug, Clone, Default)]
pub struct EdgeClasses {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub zero: Vec<usize>,
}

impl EdgeClasses {
    pub fn by_ids(graph: &DirectedGraph, plus: &[&str], minus: &[&str], zero: &[&str]) -> Result<Self> {
        let ids = |xs: &[&str]| xs.iter().map(|x| graph.edge_by_id(x)).collect::<Result<Vec<_>>>();
        Ok(Self {
            plus: ids(plus)?,
            minus: ids(minus)?,
            zero: ids(zero)?,
        })
    }

    /// The `e+` / `e-` / transition classes of a gallery graph.
    pub fn for_example(entry: &GalleryEntry) -> Result<Self> {
        let g = &entry.instance.graph_g;
        let zero: Vec<&str> = g
            .edges()
            .iter()
            .map(|e| e.id.as_str())
            .filter(|id| !["e+", "e-"].contains(id))
            .collect();
        Self::by_ids(g, &["e+"], &["e-"], &zero)
    }
}

/// Exact edge-class frequencies over a walk prefix.
pub fn walk_statistics(graph: &DirectedGraph, walk: &Walk, classes: &EdgeClasses) -> Result<WalkStatistics> {
    let n = walk.len();
    if n == 0 {
        return Err(Error::InvalidWalk("statistics of an empty walk".into()));
    }
    let (mut plus, mut minus, mut zero) = (0i64, 0i64, 0i64);
    for &e in &walk.edges {
        if classes.plus.contains(&e) {
            plus += 1;
        } else if classes.minus.contains(&e) {
            minus += 1;
        } else if classes.zero.contains(&e) {
            zero += 1;
        } else {
            return Err(Error::InvalidWalk(format!(
                "edge {:?} is not classified",
                graph.edge(e).id
            )));
        }
    }
    let f = |c: i64| Rational64::new(c, n as i64);
    Ok(WalkStatistics {
        n,
        p_plus: f(plus),
        p_minus: f(minus),
        p_zero: f(zero),
    })
}

/// An eventually periodic walk `prefix, cycle, cycle, ...`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PeriodicWalk {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl PeriodicWalk {
    /// Primitive cycle, with the prefix shortened as far as it repeats the cycle.
    pub fn canonical(mut self) -> Self {
        let n = self.cycle.len();
        if let Some(p) = (1..=n).find(|&p| n.is_multiple_of(p) && (p..n).all(|i| self.cycle[i] == self.cycle[i - p])) {
            self.cycle.truncate(p);
        }
        while let (Some(&a), Some(&b)) = (self.prefix.last(), self.cycle.last()) {
            if a != b {
                break;
            }
            self.prefix.pop();
            self.cycle.rotate_right(1);
        }
        self
    }

    pub fn stream(&self) -> CyclicWalk {
        CyclicWalk::new(self.prefix.clone(), self.cycle.clone())
    }
}

/// All eventually periodic walks from `v0` with the given size limits, up to
/// canonical form.
pub fn periodic_walks(graph: &DirectedGraph, v0: usize, max_prefix: usize, max_period: usize) -> Vec<PeriodicWalk> {
    let mut out = BTreeSet::new();
    for pre_len in 0..=max_prefix {
        for prefix in crate::finite::enumerate_walks(graph, v0, pre_len) {
            let at = prefix.last().map_or(v0, |&e| graph.dst(e));
            for len in 1..=max_period {
                for cycle in crate::finite::enumerate_walks(graph, at, len) {
                    if graph.dst(*cycle.last().unwrap()) == at {
                        out.insert(
                            PeriodicWalk {
                                prefix: prefix.clone(),
                                cycle,
                            }
                            .canonical(),
                        );
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Exact long-run average of two eventually periodic walks played together.
pub fn periodic_limit_average(instance: &GameInstance, alice: &PeriodicWalk, bob: &PeriodicWalk) -> Value {
    let start = alice.prefix.len().max(bob.prefix.len());
    let period = lcm(alice.cycle.len(), bob.cycle.len());
    let at = |w: &PeriodicWalk, i: usize| {
        if i < w.prefix.len() {
            w.prefix[i]
        } else {
            w.cycle[(i - w.prefix.len()) % w.cycle.len()]
        }
    };
    let total = (start..start + period)
        .map(|i| instance.score(at(alice, i), at(bob, i)))
        .reduce(|a, b| a.plus(&b))
        .unwrap();
    total.div_int(period as i64)
}

/// Bob's two walks out of `Y`: left branch then its loop, right branch then its loop.
pub fn bob_branches(entry: &GalleryEntry) -> Result<[PeriodicWalk; 2]> {
    let h = &entry.instance.graph_h;
    let y = h.vertex("Y")?;
    let branch = |first: usize| {
        let end = h.dst(first);
        let lp = *h.out_edges(end).first().unwrap();
        PeriodicWalk {
            prefix: vec![first],
            cycle: vec![lp],
        }
    };
    let outs = h.out_edges(y);
    Ok([branch(outs[0]), branch(outs[1])])
}

fn start_vertex(entry: &GalleryEntry) -> Result<usize> {
    Ok(entry.instance.resolve_start(&entry.start)?.v0)
}

/// Bob's better branch against one Alice strategy, by simulation.
pub fn better_branch_average<A>(entry: &GalleryEntry, alice: impl Fn() -> A, steps: usize) -> Result<Value>
where
    A: Iterator<Item = Result<usize>>,
{
    let [left, right] = bob_branches(entry)?;
    let l = final_average(&entry.instance, alice(), left.stream(), steps)?;
    let r = final_average(&entry.instance, alice(), right.stream(), steps)?;
    Ok(l.min(r))
}

/// Outcome of the periodic-strategy sweep.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodicSweep {
    pub candidates: usize,
    /// Largest simulated better-branch average over all candidates.
    pub worst: f64,
    pub worst_candidate: String,
    /// For `integer`: every candidate's exact limit equals `-p0 - |p+ - p-|`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula_agrees: Option<bool>,
}

pub fn periodic_sweep(entry: &GalleryEntry, max_prefix: usize, max_period: usize, steps: usize) -> Result<PeriodicSweep> {
    let g = &entry.instance.graph_g;
    let v0 = start_vertex(entry)?;
    let candidates = periodic_walks(g, v0, max_prefix, max_period);
    let classes = EdgeClasses::for_example(entry)?;
    let branches = bob_branches(entry)?;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_candidate = String::new();
    let mut formula_agrees = true;
    for cand in &candidates {
        let avg = better_branch_average(entry, || cand.stream(), steps)?.to_f64();
        if avg > worst {
            worst = avg;
            worst_candidate = format!(
                "({})({})*",
                g.edge_ids(&cand.prefix).join(" "),
                g.edge_ids(&cand.cycle).join(" ")
            );
        }
        if entry.name == "integer" {
            let exact = branches
                .iter()
                .map(|b| periodic_limit_average(&entry.instance, cand, b))
                .reduce(Value::min)
                .unwrap();
            let stats = walk_statistics(g, &Walk::new(cand.cycle.clone()), &classes)?;
            let formula = -stats.p_zero - (stats.p_plus - stats.p_minus).abs();
            formula_agrees &= exact == Value::Exact(formula);
        }
    }
    Ok(PeriodicSweep {
        candidates: candidates.len(),
        worst,
        worst_candidate,
        formula_agrees: (entry.name == "integer").then_some(formula_agrees),
    })
}

impl GalleryEntry {
    /// Runs the example's expectation checklist.
    pub fn checklist(&self) -> Result<Vec<CheckResult>> {
        match self.name {
            "fig2" => self.fig2_checks(),
            "chase" => self.chase_checks(),
            _ => self.periodicity_checks(),
        }
    }

    fn fig2_checks(&self) -> Result<Vec<CheckResult>> {
        let inst = &self.instance;
        let values = nonalt_values_upto(inst, 24, &self.start, SearchOptions::default())?;
        let in_range = values[1..]
            .iter()
            .all(|v| [-1, 0, 1].iter().any(|&c| *v == Value::integer(c)));
        let averages = values[1..].iter().all(|v| v.abs().to_f64() <= 2.0);
        let y = inst.graph_h.vertex("Y")?;
        let two_walks = (1..=24).all(|n| inst.graph_h.count_walks(y, n) == 2);

        // switch time T: e+ for T-1 rounds, then e0, then e- forever
        let g = &inst.graph_g;
        let (plus, zero, minus) = (g.edge_by_id("e+")?, g.edge_by_id("e0")?, g.edge_by_id("e-")?);
        let branches = bob_branches(self)?;
        let mut infinite_values = BTreeSet::new();
        let mut schedules: Vec<PeriodicWalk> = (1..=50)
            .map(|t| PeriodicWalk {
                prefix: std::iter::repeat_n(plus, t - 1).chain([zero]).collect(),
                cycle: vec![minus],
            })
            .collect();
        schedules.push(PeriodicWalk {
            prefix: vec![],
            cycle: vec![plus],
        });
        for alice in &schedules {
            let v = branches
                .iter()
                .map(|b| periodic_limit_average(inst, alice, b))
                .reduce(Value::min)
                .unwrap();
            infinite_values.insert(v.to_string());
        }
        let infinite_ok = infinite_values.len() == 1 && infinite_values.contains("-1");

        Ok(vec![
            check("reducible", self.reducible, "G and H are not both strongly connected"),
            check(
                "finite values in {-1,0,1}",
                in_range,
                format!("V(n) for n=1..24: {}", join(&values[1..])),
            ),
            check("|V(n)/n| <= 2/n", averages, "n = 1..24"),
            check("Bob has two walks from Y", two_walks, "every length 1..24"),
            check(
                "infinite game worth -1",
                infinite_ok,
                format!("switch times 1..50 and never: {infinite_values:?}"),
            ),
        ])
    }

    fn chase_checks(&self) -> Result<Vec<CheckResult>> {
        let inst = &self.instance;
        let mut alt_ok = true;
        let mut nonalt_ok = true;
        let mut gap_ok = true;
        let mut rows = Vec::new();
        for n in 1..=10 {
            let alt = value_alt_finite(inst, n, &self.start)?;
            let nonalt = value_nonalt_finite(inst, n, &self.start)?.value;
            alt_ok &= alt == Value::integer(n as i64);
            nonalt_ok &= nonalt <= Value::integer(2);
            gap_ok &= alt.minus(&nonalt) >= Value::integer(n as i64 - 2);
            rows.push(format!("{n}:{alt}/{nonalt}"));
        }
        let inf = value_alt_infinite(inst, &self.start, None)?;
        Ok(vec![
            check("irreducible", !self.reducible, "both graphs strongly connected"),
            check("alternating value is n", alt_ok, rows.join(" ")),
            check("non-alternating value at most 2", nonalt_ok, "n = 1..10"),
            check("gap at least n - 2", gap_ok, "n = 1..10"),
            check(
                "alternating mean payoff is 1",
                inf.bounds.exact == Some(Value::integer(1)),
                format!("value iteration: {:?}", inf.bounds.exact.map(|v| v.to_string())),
            ),
        ])
    }

    fn periodicity_checks(&self) -> Result<Vec<CheckResult>> {
        let sweep = periodic_sweep(self, 4, 6, SIMULATION_STEPS)?;
        let walk = nonperiodic_walk(self.name, SIMULATION_STEPS)?;
        let nonperiodic = better_branch_average(self, || CyclicWalk::finite(walk.edges.clone()), SIMULATION_STEPS)?;
        let [left, right] = bob_branches(self)?;
        let both: Vec<f64> = [left, right]
            .iter()
            .map(|b| final_average(&self.instance, CyclicWalk::finite(walk.edges.clone()), b.stream(), SIMULATION_STEPS))
            .collect::<Result<Vec<Value>>>()?
            .iter()
            .map(Value::to_f64)
            .collect();
        let stats = walk_statistics(&self.instance.graph_g, &walk, &EdgeClasses::for_example(self)?)?;
        let mut checks = vec![
            check("reducible", self.reducible, "Bob's start Y lies outside every cycle"),
            check(
                "periodic strategies lose",
                sweep.worst <= -1e-3,
                format!(
                    "{} candidates, best for Alice {:.6} by {}",
                    sweep.candidates, sweep.worst, sweep.worst_candidate
                ),
            ),
            check(
                "non-periodic walk breaks even",
                both.iter().all(|a| a.abs() <= 1e-2),
                format!("averages {both:?} at {SIMULATION_STEPS} steps, better branch {nonperiodic}"),
            ),
        ];
        if self.name == "irrational" {
            let gap = ALPHA * ratio_f64(stats.p_plus) - beta() * ratio_f64(stats.p_minus);
            checks.push(check(
                "balanced frequencies",
                gap.abs() <= 1e-3,
                format!("alpha p+ - beta p- = {gap:.3e}"),
            ));
        } else {
            checks.push(check(
                "exact periodic payoff formula",
                sweep.formula_agrees == Some(true),
                "limit equals -p0 - |p+ - p-| for every candidate",
            ));
        }
        Ok(checks)
    }
}

fn ratio_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn join(values: &[Value]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Runs the checklist of one example, or of all of them.
pub fn run_gallery(name: &str) -> Result<Vec<(String, Vec<CheckResult>)>> {
    let names: Vec<&str> = if name == "all" { NAMES.to_vec() } else { vec![name] };
    names
        .into_iter()
        .map(|n| {
            let entry = build_example(n)?;
            Ok((n.to_string(), entry.checklist()?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::{bob_best_response, brute_values};

    #[test]
    fn example_sizes() {
        let e = build_example("fig2").unwrap();
        let (g, h) = (&e.instance.graph_g, &e.instance.graph_h);
        assert_eq!((g.vertex_count(), g.edge_count(), h.vertex_count(), h.edge_count()), (2, 3, 3, 4));
        assert!(e.reducible);
        let e = build_example("chase").unwrap();
        assert_eq!((e.instance.graph_g.edge_count(), e.instance.graph_h.edge_count()), (16, 12));
        assert!(!e.reducible);
        let e = build_example("integer").unwrap();
        let g = &e.instance.graph_g;
        let h = &e.instance.graph_h;
        for ge in g.edges() {
            for he in h.edges() {
                let want = if (ge.id == "e+" && he.id == "f+") || (ge.id == "e-" && he.id == "f-") { 1 } else { -1 };
                let (ei, fi) = (g.edge_by_id(&ge.id).unwrap(), h.edge_by_id(&he.id).unwrap());
                assert_eq!(e.instance.score(ei, fi), Value::integer(want));
            }
        }
        assert!(matches!(build_example("nope"), Err(Error::UnknownExample(_))));
    }

    #[test]
    fn chase_scores_are_signs() {
        let e = build_example("chase").unwrap();
        let inst = &e.instance;
        for a in 0..16 {
            for b in 0..12 {
                let v = inst.score(a, b);
                assert!(v == Value::integer(1) || v == Value::integer(-1));
            }
        }
    }

    #[test]
    fn fig2_small_values_match_brute_force() {
        let e = build_example("fig2").unwrap();
        for n in 0..=6 {
            let (nonalt, alt) = brute_values(&e.instance, n, &e.start).unwrap();
            assert_eq!(value_nonalt_finite(&e.instance, n, &e.start).unwrap().value, nonalt);
            assert_eq!(value_alt_finite(&e.instance, n, &e.start).unwrap(), alt);
        }
        let alice = Walk::from_ids(&e.instance.graph_g, &["e+", "e0", "e-"]).unwrap();
        let (v, w) = bob_best_response(&e.instance, &alice, e.instance.graph_h.vertex("Y").unwrap()).unwrap();
        assert_eq!(v, Value::integer(-1));
        assert_eq!(w.ids(&e.instance.graph_h), ["f1", "f+", "f+"]);
    }

    #[test]
    fn integer_walk_prefix() {
        let w = nonperiodic_walk("integer", 4).unwrap();
        let e = build_example("integer").unwrap();
        assert_eq!(w.ids(&e.instance.graph_g), ["e-", "ea", "e+", "eb"]);
        let w = nonperiodic_walk("integer", 22).unwrap();
        let stats = walk_statistics(&e.instance.graph_g, &w, &EdgeClasses::for_example(&e).unwrap()).unwrap();
        // blocks of sizes 1, 2, 3 fill 4 + 6 + 8 = 18 steps, then e- e- e- e-
        assert_eq!(stats.p_plus, Rational64::new(6, 22));
        assert_eq!(stats.p_minus, Rational64::new(10, 22));
        assert_eq!(stats.p_zero, Rational64::new(6, 22));
    }

    #[test]
    fn integer_walk_statistics() {
        let e = build_example("integer").unwrap();
        let g = &e.instance.graph_g;
        let classes = EdgeClasses::for_example(&e).unwrap();
        // the transition edges thin out like 2 / sqrt(n), so 10^4 steps are
        // not yet within 10^-2 of the limit (1/2, 1/2, 0)
        let s = walk_statistics(g, &nonperiodic_walk("integer", 10_000).unwrap(), &classes).unwrap();
        assert_eq!(
            (s.p_plus, s.p_minus, s.p_zero),
            (Rational64::new(4853, 10_000), Rational64::new(4950, 10_000), Rational64::new(197, 10_000))
        );
        let s = walk_statistics(g, &nonperiodic_walk("integer", 100_000).unwrap(), &classes).unwrap();
        let half = Rational64::new(1, 2);
        let tol = Rational64::new(1, 100);
        assert!((s.p_plus - half).abs() <= tol);
        assert!((s.p_minus - half).abs() <= tol);
        assert!(s.p_zero <= tol);
    }

    #[test]
    fn irrational_walk_is_balanced() {
        let e = build_example("irrational").unwrap();
        let classes = EdgeClasses::for_example(&e).unwrap();
        let walk = nonperiodic_walk("irrational", 100_000).unwrap();
        let s = walk_statistics(&e.instance.graph_g, &walk, &classes).unwrap();
        let gap = ALPHA * ratio_f64(s.p_plus) - beta() * ratio_f64(s.p_minus);
        assert!(gap.abs() <= 1e-3, "{gap}");
    }

    #[test]
    fn simple_statistics() {
        let e = build_example("irrational").unwrap();
        let g = &e.instance.graph_g;
        let classes = EdgeClasses::for_example(&e).unwrap();
        let plus = g.edge_by_id("e+").unwrap();
        let minus = g.edge_by_id("e-").unwrap();
        let s = walk_statistics(g, &Walk::new(vec![plus; 5]), &classes).unwrap();
        assert_eq!(s.p_plus, Rational64::from_integer(1));
        let s = walk_statistics(g, &Walk::new([plus, minus].repeat(4)), &classes).unwrap();
        assert_eq!((s.p_plus, s.p_minus), (Rational64::new(1, 2), Rational64::new(1, 2)));
        let none = EdgeClasses::default();
        assert!(walk_statistics(g, &Walk::new(vec![plus]), &none).is_err());
    }

    #[test]
    fn canonical_periodic_walks() {
        let w = PeriodicWalk { prefix: vec![1, 0, 1], cycle: vec![0, 1, 0, 1] }.canonical();
        assert_eq!(w, PeriodicWalk { prefix: vec![], cycle: vec![1, 0] });
        let e = build_example("irrational").unwrap();
        let all = periodic_walks(&e.instance.graph_g, 0, 0, 2);
        // cycles 0, 1, 01 (10 is a rotation only through a prefix)
        assert_eq!(all.len(), 4);
    }
}
