//! Infinite-round values.
//!
//! For the non-alternating game the limit of `r_n / n` is bracketed by
//! certified bounds built from finite values `r_n = V(n | start)`:
//!
//! * upper: the approximate-subadditivity (Fekete) bound `(r_n + C) / n`, and
//!   Bob's block bound `max_x V(n | x) / n` over pairs `x` of the start's
//!   cyclic class (Bob restarts a best response every `n` steps);
//! * lower: Alice's block bound `min_v V(n | v, U_v) / n` (she restarts a
//!   walk that is optimal against every Bob vertex she cannot rule out), and
//!   the padded periodic-block bound `(r_pk - 3pD|P|) / (pk + pD)`.
//!
//! When one player has no choice, or the score is constant, the value is a
//! mean cycle and is returned exactly.
//!
//! The alternating game is solved by value iteration over reachable vertex
//! pairs.

use std::collections::{BTreeSet, VecDeque};

use num_integer::Integer;
use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite::{alt_step, nonalt_profile, SearchOptions};
use crate::graph::DirectedGraph;
use crate::instance::{GameInstance, ScoreView, StartSpec};
use crate::mmc::max_mean_cycle_w;
use crate::structure::{is_irreducible, product_component_at, ProductComponent};
use crate::value::{Value, Weight};
use crate::with_scores;

/// Largest `n + m` checked by the subadditivity audit.
pub const AUDIT_HORIZON: usize = 12;

const REDUCIBLE: &str = "infinite-round non-alternating solve requires irreducible graphs";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueBounds {
    pub lower: Value,
    pub upper: Value,
    pub horizon_used: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant_c: Option<Value>,
    /// Set when the value is known exactly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<Value>,
}

impl ValueBounds {
    pub fn width(&self) -> f64 {
        self.upper.to_f64() - self.lower.to_f64()
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.lower <= *v && *v <= self.upper
    }

    pub fn intersects(&self, other: &ValueBounds) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EscalationKind {
    /// `r_{n+m} > r_n + r_m + C` for some member pair's values.
    Subadditivity,
    /// `|V(n | x) - V(n | y)| > C` for two members of the component.
    ComponentSpread,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Escalation {
    pub kind: EscalationKind,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub required: Value,
}

/// The constant `C` together with the audit that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantAudit {
    /// `3 p D |P|`.
    pub analytic: Value,
    pub constant: Value,
    pub escalations: Vec<Escalation>,
    pub horizon: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonAltBounds {
    #[serde(flatten)]
    pub bounds: ValueBounds,
    pub period: usize,
    pub padding: usize,
    pub component_size: usize,
    pub audit: ConstantAudit,
    /// Guaranteed average of the growing-block strategy at `b_{k0}`, for the
    /// largest `k0` within budget.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_yield: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collapse: Option<&'static str>,
    /// `r_0, ..., r_N` for the start.
    pub values: Vec<Value>,
}

/// `V(n | v, u)` for every member of the component, `n = 0..=horizon`.
fn pair_tables<W: Weight>(
    s: &ScoreView<W>,
    g: &DirectedGraph,
    h: &DirectedGraph,
    comp: &ProductComponent,
    horizon: usize,
    opts: SearchOptions,
) -> Result<Vec<Vec<W>>> {
    comp.members
        .iter()
        .map(|&(v, u)| Ok(nonalt_profile(s, g, h, v, &[u], horizon, opts)?.values))
        .collect()
}

fn audit<W: Weight>(
    s: &ScoreView<W>,
    comp: &ProductComponent,
    tables: &[Vec<W>],
    extra: Option<&[W]>,
) -> (W, ConstantAudit) {
    let analytic = s.norm().times((3 * comp.period * comp.padding) as i64);
    let mut c = analytic;
    let mut escalations = Vec::new();
    let top = AUDIT_HORIZON;
    for r in tables.iter().map(|t| t.as_slice()).chain(extra) {
        for n in 1..top {
            for m in n..=top - n {
                let need = r[n + m] - r[n] - r[m];
                if need > c {
                    c = need;
                    escalations.push(Escalation {
                        kind: EscalationKind::Subadditivity,
                        n,
                        m: Some(m),
                        required: s.value(need),
                    });
                }
            }
        }
    }
    for n in 1..=top {
        let col = tables.iter().map(|t| t[n]);
        let hi = col.clone().reduce(W::max_w).unwrap();
        let lo = col.reduce(W::min_w).unwrap();
        if hi - lo > c {
            c = hi - lo;
            escalations.push(Escalation {
                kind: EscalationKind::ComponentSpread,
                n,
                m: None,
                required: s.value(c),
            });
        }
    }
    (
        c,
        ConstantAudit {
            analytic: s.value(analytic),
            constant: s.value(c),
            escalations,
            horizon: top,
        },
    )
}

/// The constant `C` for a product component, audited on every member's
/// values up to [`AUDIT_HORIZON`].
pub fn subadditive_constant(
    instance: &GameInstance,
    component: &ProductComponent,
) -> Result<ConstantAudit> {
    let (g, h) = (&instance.graph_g, &instance.graph_h);
    with_scores!(instance, s => {
        let tables = pair_tables(&s, g, h, component, AUDIT_HORIZON, SearchOptions::default())?;
        Ok(audit(&s, component, &tables, None).1)
    })
}

/// Mean-cycle value when a player has no choice or the score is constant.
fn exact_collapse<W: Weight>(
    s: &ScoreView<W>,
    g: &DirectedGraph,
    h: &DirectedGraph,
    comp: &ProductComponent,
) -> Option<(Value, &'static str)> {
    if let Some(c) = s.constant() {
        return Some((s.value(c), "constant-score"));
    }
    let (h_forced, g_forced) = (h.is_single_choice(), g.is_single_choice());
    if !h_forced && !g_forced {
        return None;
    }
    let sign = if h_forced { 1 } else { -1 };
    let edges: Vec<(usize, usize, W)> = comp
        .edge_pairs
        .iter()
        .map(|&(e, f)| {
            let a = comp.index_of(g.src(e), h.src(f)).unwrap();
            let b = comp.index_of(g.dst(e), h.dst(f)).unwrap();
            (a, b, s.get(e, f).times(sign))
        })
        .collect();
    let cycle = max_mean_cycle_w(comp.len(), &edges)?;
    let len = cycle.edges.len() as i64;
    if h_forced {
        Some((s.ratio(cycle.sum, len), "bob-single-choice"))
    } else {
        Some((s.ratio(-cycle.sum, len), "alice-single-choice"))
    }
}

#[allow(clippy::too_many_arguments)]
fn bounds_core<W: Weight>(
    s: &ScoreView<W>,
    g: &DirectedGraph,
    h: &DirectedGraph,
    comp: &ProductComponent,
    v0: usize,
    starts: &[usize],
    free: bool,
    budget: usize,
    opts: SearchOptions,
) -> Result<NonAltBounds> {
    let norm = s.norm();
    let (p, d) = (comp.period, comp.padding);
    let pd = (p * d) as i64;
    let horizon = budget.max(AUDIT_HORIZON);
    let tables = pair_tables(s, g, h, comp, horizon, opts)?;
    let r: Vec<W> = if free {
        nonalt_profile(s, g, h, v0, starts, horizon, opts)?.values
    } else {
        tables[comp.index_of(v0, starts[0]).unwrap()].clone()
    };
    let (c, audit) = audit(s, comp, &tables, free.then_some(r.as_slice()));

    let mut upper = s.value(norm);
    let mut lower = s.value(-norm);
    let mut block_yield = None;

    if budget >= p {
        for (n, &rn) in r.iter().enumerate().take(budget + 1).skip(1) {
            upper = upper.min(s.ratio(rn + c, n as i64));
        }

        let bob_classes: BTreeSet<usize> = starts
            .iter()
            .filter_map(|&u| comp.class_of(v0, u))
            .collect();
        for n in (p..=budget).step_by(p) {
            let cand = bob_classes
                .iter()
                .map(|&cls| {
                    (0..comp.len())
                        .filter(|&i| comp.classes[i] == cls)
                        .map(|i| s.ratio(tables[i][n], n as i64))
                        .reduce(Value::max)
                        .unwrap()
                })
                .reduce(Value::min)
                .unwrap();
            upper = upper.min(cand);
        }

        // Alice's block bound: Bob may be at any u sharing her vertex's class
        let mut alice_sets: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
        for (i, &(v, u)) in comp.members.iter().enumerate() {
            if free || comp.classes[i] == 0 {
                alice_sets[v].push(u);
            }
        }
        let mut alice_profiles = Vec::new();
        for (v, set) in alice_sets.iter().enumerate() {
            if !set.is_empty() {
                alice_profiles.push(nonalt_profile(s, g, h, v, set, budget, opts)?.values);
            }
        }
        let step = if free { 1 } else { p };
        for n in (step..=budget).step_by(step) {
            let cand = alice_profiles
                .iter()
                .map(|prof| s.ratio(prof[n], n as i64))
                .reduce(Value::min)
                .unwrap();
            lower = lower.max(cand);
        }

        for k in (d..).take_while(|k| p * k <= budget) {
            let n = p * k;
            let cand = s.ratio(r[n] - norm.times(3 * pd), n as i64 + pd);
            lower = lower.max(cand);
        }

        let mut sum = W::ZERO;
        let mut a_k = 0i64;
        for k0 in (1..).take_while(|k| p * k <= budget) {
            sum = sum + r[p * k0];
            let b = a_k + (p * k0) as i64;
            let overhead = norm.times((k0 as i64 - 1) * pd + 2 * k0 as i64 * pd);
            block_yield = Some(s.ratio(sum - overhead, b));
            a_k = b + pd;
        }
    }

    if lower > upper {
        return Err(Error::Internal(format!(
            "certified bounds crossed: lower {lower} > upper {upper}"
        )));
    }

    let mut exact = None;
    let mut collapse = None;
    if budget >= p {
        if let Some((x, kind)) = exact_collapse(s, g, h, comp) {
            let slack = match x {
                Value::Exact(_) => 0.0,
                Value::Float(_) => 1e-9 * (1.0 + norm.to_f64()),
            };
            if x.to_f64() < lower.to_f64() - slack || x.to_f64() > upper.to_f64() + slack {
                return Err(Error::Internal(format!(
                    "mean-cycle value {x} outside certified interval [{lower}, {upper}]"
                )));
            }
            lower = x;
            upper = x;
            exact = Some(x);
            collapse = Some(kind);
        }
    }

    Ok(NonAltBounds {
        bounds: ValueBounds {
            lower,
            upper,
            horizon_used: budget,
            constant_c: Some(s.value(c)),
            exact,
        },
        period: p,
        padding: d,
        component_size: comp.len(),
        audit,
        block_yield,
        collapse,
        values: r.iter().take(budget + 1).map(|&w| s.value(w)).collect(),
    })
}

fn require_irreducible(instance: &GameInstance) -> Result<()> {
    if is_irreducible(&instance.graph_g) && is_irreducible(&instance.graph_h) {
        Ok(())
    } else {
        Err(Error::Hypothesis(REDUCIBLE.into()))
    }
}

/// Certified bounds on the infinite-round non-alternating value.
pub fn value_nonalt_bounds(
    instance: &GameInstance,
    start: &StartSpec,
    budget: usize,
) -> Result<NonAltBounds> {
    value_nonalt_bounds_with(instance, start, budget, SearchOptions::default())
}

pub fn value_nonalt_bounds_with(
    instance: &GameInstance,
    start: &StartSpec,
    budget: usize,
    opts: SearchOptions,
) -> Result<NonAltBounds> {
    require_irreducible(instance)?;
    let st = instance.resolve_start(start)?;
    let (g, h) = (&instance.graph_g, &instance.graph_h);
    let comp = product_component_at(g, h, st.v0, st.u0)?;
    with_scores!(instance, s => bounds_core(&s, g, h, &comp, st.v0, &[st.u0], false, budget, opts))
}

/// Bounds when Bob may choose his starting vertex freely.
pub fn value_nonalt_bounds_free(
    instance: &GameInstance,
    v0: usize,
    budget: usize,
    opts: SearchOptions,
) -> Result<NonAltBounds> {
    require_irreducible(instance)?;
    let (g, h) = (&instance.graph_g, &instance.graph_h);
    let comp = product_component_at(g, h, v0, 0)?;
    let starts: Vec<usize> = (0..h.vertex_count()).filter(|&u| comp.contains(v0, u)).collect();
    if starts.len() != h.vertex_count() {
        return Err(Error::Hypothesis(
            "free-start solve requires all Bob vertices in one product component".into(),
        ));
    }
    with_scores!(instance, s => bounds_core(&s, g, h, &comp, v0, &starts, true, budget, opts))
}

/// Vertex pairs reachable from `(v0, u0)`, in BFS order.
fn reachable_pairs(g: &DirectedGraph, h: &DirectedGraph, v0: usize, u0: usize) -> Vec<usize> {
    let nh = h.vertex_count();
    let (sg, sh) = (g.successors(), h.successors());
    let mut seen = vec![false; g.vertex_count() * nh];
    let mut order = vec![v0 * nh + u0];
    seen[v0 * nh + u0] = true;
    let mut queue = VecDeque::from([v0 * nh + u0]);
    while let Some(x) = queue.pop_front() {
        for &v in &sg[x / nh] {
            for &u in &sh[x % nh] {
                let y = v * nh + u;
                if !seen[y] {
                    seen[y] = true;
                    order.push(y);
                    queue.push_back(y);
                }
            }
        }
    }
    order
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AltInfinite {
    #[serde(flatten)]
    pub bounds: ValueBounds,
    pub iterations: usize,
    pub reachable_pairs: usize,
}

const MAX_ITERATIONS: usize = 1_000_000;

/// Iteration count large enough to isolate the value exactly, capped.
fn default_iterations<W: Weight>(m: usize, norm: W, exact: bool) -> usize {
    if !exact {
        return 100_000;
    }
    let n = norm.to_f64().max(1.0);
    let need = 4.0 * (m as f64).powi(3) * n + 1.0;
    (need.min(MAX_ITERATIONS as f64) as usize).max(1)
}

/// The only rational with denominator at most `m` in `[lo/k, hi/k]`, if
/// there is exactly one.
fn isolate(lo: i128, hi: i128, k: i128, m: usize) -> Option<(i128, i128)> {
    let mut found: Option<(i128, i128)> = None;
    for b in 1..=m as i128 {
        let first = Integer::div_ceil(&(lo * b), &k);
        let last = Integer::div_floor(&(hi * b), &k);
        if last - first > 1 {
            return None;
        }
        for a in first..=last {
            let g = a.gcd(&b);
            let cand = (a / g, b / g);
            match found {
                None => found = Some(cand),
                Some(f) if f == cand => {}
                Some(_) => return None,
            }
        }
    }
    found
}

/// Infinite-round alternating value by value iteration.
pub fn value_alt_infinite(
    instance: &GameInstance,
    start: &StartSpec,
    iterations: Option<usize>,
) -> Result<AltInfinite> {
    let st = instance.resolve_start(start)?;
    let (g, h) = (&instance.graph_g, &instance.graph_h);
    let nh = h.vertex_count();
    let pairs = reachable_pairs(g, h, st.v0, st.u0);
    let m = pairs.len();
    with_scores!(instance, s => {
        let norm = s.norm();
        let exact_mode = matches!(s.value(norm), Value::Exact(_));
        let k = iterations.unwrap_or_else(|| default_iterations(m, norm, exact_mode)).max(1);
        let mut cur = vec![Weight::ZERO; g.vertex_count() * nh];
        let mut next = cur.clone();
        for _ in 0..k {
            for &x in &pairs {
                next[x] = alt_step(&s, g, h, &cur, x / nh, x % nh);
            }
            std::mem::swap(&mut cur, &mut next);
        }
        let vk = cur[st.v0 * nh + st.u0];
        let slack = norm.times(2 * m as i64);
        let mut lower = s.ratio(vk - slack, k as i64).max(s.value(-norm));
        let mut upper = s.ratio(vk + slack, k as i64).min(s.value(norm));
        let mut exact = None;
        if exact_mode {
            let (vk, slack) = (vk.to_f64() as i128, slack.to_f64() as i128);
            if let Some((a, b)) = isolate(vk - slack, vk + slack, k as i128, m) {
                let den = b * s.scale() as i128;
                if let (Ok(a), Ok(den)) = (i64::try_from(a), i64::try_from(den)) {
                    let x = Value::Exact(Rational64::new(a, den));
                    lower = x;
                    upper = x;
                    exact = Some(x);
                }
            }
        }
        Ok(AltInfinite {
            bounds: ValueBounds {
                lower,
                upper,
                horizon_used: k,
                constant_c: None,
                exact,
            },
            iterations: k,
            reachable_pairs: m,
        })
    })
}

/// A mean together with the cycle of edge pairs attaining it.
pub type PairCycle = (Value, Vec<(usize, usize)>);

/// Maximum mean cycle of the product graph reachable from the start, with
/// edge pair weights `P(e, f)`: the value of the game when Bob has no choice.
pub fn product_max_mean_cycle(
    instance: &GameInstance,
    start: &StartSpec,
) -> Result<Option<PairCycle>> {
    let st = instance.resolve_start(start)?;
    let (g, h) = (&instance.graph_g, &instance.graph_h);
    let nh = h.vertex_count();
    let pairs = reachable_pairs(g, h, st.v0, st.u0);
    let mut local = vec![usize::MAX; g.vertex_count() * nh];
    for (i, &x) in pairs.iter().enumerate() {
        local[x] = i;
    }
    let mut pair_of_edge = Vec::new();
    Ok(with_scores!(instance, s => {
        let mut edges = Vec::new();
        for e in 0..g.edge_count() {
            for f in 0..h.edge_count() {
                let a = local[g.src(e) * nh + h.src(f)];
                if a == usize::MAX {
                    continue;
                }
                let b = local[g.dst(e) * nh + h.dst(f)];
                edges.push((a, b, s.get(e, f)));
                pair_of_edge.push((e, f));
            }
        }
        max_mean_cycle_w(pairs.len(), &edges).map(|c| {
            let mean = s.ratio(c.sum, c.edges.len() as i64);
            (mean, c.edges.iter().map(|&i| pair_of_edge[i]).collect())
        })
    }))
}
