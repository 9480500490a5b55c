//! Exact n-round values.
//!
//! Bob's best response to a fixed Alice walk is a forward dynamic program over
//! cost vectors indexed by `H` vertices. The non-alternating value is a
//! max-min over Alice walks, searched layer by layer with Pareto pruning: two
//! partial walks that reach the same `G` vertex after the same number of
//! steps are compared by their cost vectors, and a vector dominated
//! componentwise can never give Alice a larger final minimum.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{validate_walk, DirectedGraph, Walk};
use crate::instance::{GameInstance, ScoreView, StartSpec};
use crate::value::{Value, Weight};
use crate::with_scores;

pub const DEFAULT_NODE_CAP: usize = 5_000_000;

/// Largest `|Alice walks| * |Bob walks|` the brute-force oracle will enumerate.
pub const BRUTE_LIMIT: u128 = 10_000_000;

/// Minimal Bob cost per `H` vertex; `None` is `+inf` (unreachable).
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector<W>(pub Vec<Option<W>>);

impl<W: Weight> CostVector<W> {
    /// Cost 0 at every allowed start, unreachable elsewhere.
    pub fn initial(n_h: usize, starts: &[usize]) -> Self {
        let mut v = vec![None; n_h];
        for &u in starts {
            v[u] = Some(W::ZERO);
        }
        CostVector(v)
    }

    /// Extends every Bob walk by one edge against Alice's edge `e`.
    pub fn step(&self, s: &ScoreView<W>, h: &DirectedGraph, e: usize) -> Self {
        let mut next: Vec<Option<W>> = vec![None; self.0.len()];
        for (u, c) in self.0.iter().enumerate() {
            let Some(c) = *c else { continue };
            for &f in h.out_edges(u) {
                let cand = c + s.get(e, f);
                let slot = &mut next[h.dst(f)];
                *slot = Some(match *slot {
                    Some(old) => old.min_w(cand),
                    None => cand,
                });
            }
        }
        CostVector(next)
    }

    /// Bob's best total: the smallest finite entry.
    pub fn minimum(&self) -> Option<W> {
        self.0.iter().flatten().copied().reduce(W::min_w)
    }

    /// `self >= other` in every coordinate, `+inf` being largest.
    pub fn dominates(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| match (a, b) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(x), Some(y)) => x >= y,
        })
    }

    fn infinities(&self) -> usize {
        self.0.iter().filter(|c| c.is_none()).count()
    }

    fn finite_sum(&self) -> f64 {
        self.0.iter().flatten().map(|w| w.to_f64()).sum()
    }
}

/// Search limits for the non-alternating solver.
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub node_cap: usize,
    pub prune: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            node_cap: DEFAULT_NODE_CAP,
            prune: true,
        }
    }
}

impl SearchOptions {
    /// Defaults, with the node cap taken from `MPG_NODE_CAP` when set.
    pub fn from_env() -> Self {
        let node_cap = std::env::var("MPG_NODE_CAP")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_NODE_CAP);
        Self {
            node_cap,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FiniteValueResult {
    pub rounds: usize,
    pub value: Value,
    #[serde(serialize_with = "serialize_walk_len")]
    pub witness_alice: Walk,
    #[serde(serialize_with = "serialize_walk_len")]
    pub witness_bob: Walk,
    pub nodes_expanded: u64,
    pub exact: bool,
}

fn serialize_walk_len<S: serde::Serializer>(w: &Walk, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u64(w.len() as u64)
}

/// Bob's best response against a fixed Alice walk, from any of `starts`.
///
/// Returns the minimal paired score sum and the lexicographically smallest
/// walk attaining it.
pub(crate) fn best_response<W: Weight>(
    s: &ScoreView<W>,
    h: &DirectedGraph,
    alice: &[usize],
    starts: &[usize],
) -> (W, Vec<usize>) {
    let n = alice.len();
    let nh = h.vertex_count();
    // suffix[j][u]: Bob's cheapest completion from u against alice[j..]
    let mut suffix = vec![vec![W::ZERO; nh]; n + 1];
    for j in (0..n).rev() {
        for u in 0..nh {
            suffix[j][u] = h
                .out_edges(u)
                .iter()
                .map(|&f| s.get(alice[j], f) + suffix[j + 1][h.dst(f)])
                .reduce(W::min_w)
                .expect("sink-free");
        }
    }
    let best = starts
        .iter()
        .map(|&u| suffix[0][u])
        .reduce(W::min_w)
        .expect("at least one Bob start");
    if n == 0 {
        return (W::ZERO, Vec::new());
    }

    let tight = |j: usize, f: usize| s.get(alice[j], f) + suffix[j + 1][h.dst(f)];
    let mut walk = Vec::with_capacity(n);
    let first = starts
        .iter()
        .filter(|&&u| suffix[0][u] == best)
        .flat_map(|&u| h.out_edges(u).iter().copied())
        .filter(|&f| tight(0, f) == best)
        .min_by(|&a, &b| h.edge(a).id.cmp(&h.edge(b).id))
        .expect("tight first edge");
    walk.push(first);
    let mut u = h.dst(first);
    for j in 1..n {
        let f = *h
            .out_edges(u)
            .iter()
            .find(|&&f| tight(j, f) == suffix[j][u])
            .expect("tight edge");
        walk.push(f);
        u = h.dst(f);
    }
    (best, walk)
}

/// Bob's best response from a single `H` vertex.
pub fn bob_best_response(
    instance: &GameInstance,
    alice_walk: &Walk,
    start_h: usize,
) -> Result<(Value, Walk)> {
    bob_best_response_from(instance, alice_walk, &[start_h])
}

/// Bob's best response when he may start at any vertex of `starts`.
pub fn bob_best_response_from(
    instance: &GameInstance,
    alice_walk: &Walk,
    starts: &[usize],
) -> Result<(Value, Walk)> {
    alice_walk.validate(&instance.graph_g, None)?;
    check_starts(&instance.graph_h, starts)?;
    Ok(with_scores!(instance, s => {
        let (w, walk) = best_response(&s, &instance.graph_h, &alice_walk.edges, starts);
        (s.value(w), Walk::new(walk))
    }))
}

fn check_starts(h: &DirectedGraph, starts: &[usize]) -> Result<()> {
    if starts.is_empty() {
        return Err(Error::MissingStart("empty set of Bob start vertices".into()));
    }
    if let Some(&u) = starts.iter().find(|&&u| u >= h.vertex_count()) {
        return Err(Error::Internal(format!("Bob start index {u} out of range")));
    }
    Ok(())
}

/// Per-round outcome of one layered search: `values[k]` is the `k`-round
/// non-alternating value and `witnesses[k]` Alice's optimal walk.
#[derive(Debug, Clone)]
pub(crate) struct Profile<W> {
    pub values: Vec<W>,
    pub witnesses: Vec<Vec<usize>>,
    pub nodes_expanded: u64,
}

struct Layer<W> {
    vertex: Vec<usize>,
    cost: Vec<CostVector<W>>,
    parent: Vec<u32>,
    edge: Vec<u32>,
}

impl<W: Weight> Layer<W> {
    fn best(&self) -> (usize, W) {
        let mut best: Option<(usize, W)> = None;
        for (i, c) in self.cost.iter().enumerate() {
            let m = c.minimum().expect("Bob always has a walk");
            if best.is_none_or(|(_, b)| m > b) {
                best = Some((i, m));
            }
        }
        best.expect("nonempty layer")
    }
}

fn backtrack<W>(layers: &[Layer<W>], mut node: usize) -> Vec<usize> {
    let mut walk = Vec::with_capacity(layers.len() - 1);
    for layer in layers[1..].iter().rev() {
        walk.push(layer.edge[node] as usize);
        node = layer.parent[node] as usize;
    }
    walk.reverse();
    walk
}

/// Pareto-maximal subset of one bucket, kept in its original order.
fn prune_bucket<W: Weight>(cost: &[CostVector<W>], members: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = members.to_vec();
    // a dominator sorts ahead of everything it dominates; ties keep input order
    order.sort_by(|&a, &b| {
        let (ca, cb) = (&cost[a], &cost[b]);
        cb.infinities()
            .cmp(&ca.infinities())
            .then_with(|| cb.finite_sum().total_cmp(&ca.finite_sum()))
            .then(a.cmp(&b))
    });
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        if !kept.iter().any(|&k| cost[k].dominates(&cost[i])) {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    kept
}

/// Layered search from Alice vertex `v0` against Bob starting anywhere in
/// `starts`, for every horizon `0..=n`.
pub(crate) fn nonalt_profile<W: Weight>(
    s: &ScoreView<W>,
    g: &DirectedGraph,
    h: &DirectedGraph,
    v0: usize,
    starts: &[usize],
    n: usize,
    opts: SearchOptions,
) -> Result<Profile<W>> {
    let nh = h.vertex_count();
    let mut layers = vec![Layer {
        vertex: vec![v0],
        cost: vec![CostVector::initial(nh, starts)],
        parent: vec![0],
        edge: vec![0],
    }];
    let mut values = vec![W::ZERO];
    let mut witnesses = vec![Vec::new()];
    let mut stored = 1usize;
    let mut nodes_expanded = 0u64;

    for round in 1..=n {
        let prev = layers.last().unwrap();
        let mut vertex = Vec::new();
        let mut cost = Vec::new();
        let mut parent = Vec::new();
        let mut edge = Vec::new();
        for (i, &v) in prev.vertex.iter().enumerate() {
            nodes_expanded += 1;
            for &e in g.out_edges(v) {
                vertex.push(g.dst(e));
                cost.push(prev.cost[i].step(s, h, e));
                parent.push(i as u32);
                edge.push(e as u32);
            }
        }

        let keep: Vec<usize> = if opts.prune {
            let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
            for (i, &v) in vertex.iter().enumerate() {
                buckets[v].push(i);
            }
            let mut keep: Vec<usize> = buckets
                .iter()
                .filter(|b| !b.is_empty())
                .flat_map(|b| prune_bucket(&cost, b))
                .collect();
            keep.sort_unstable();
            keep
        } else {
            (0..vertex.len()).collect()
        };

        stored += keep.len();
        if stored > opts.node_cap {
            let best_lower_bound = cap_lower_bound(s, g, h, prev, &layers, starts, n);
            return Err(Error::NodeCapExceeded {
                cap: opts.node_cap,
                round,
                best_lower_bound: s.value(best_lower_bound).to_string(),
            });
        }

        let mut cost_slots: Vec<Option<CostVector<W>>> = cost.into_iter().map(Some).collect();
        let layer = Layer {
            vertex: keep.iter().map(|&i| vertex[i]).collect(),
            cost: keep.iter().map(|&i| cost_slots[i].take().unwrap()).collect(),
            parent: keep.iter().map(|&i| parent[i]).collect(),
            edge: keep.iter().map(|&i| edge[i]).collect(),
        };
        // only the newest layer needs cost vectors
        let depth = layers.len();
        if depth > 1 {
            layers[depth - 1].cost = Vec::new();
        }
        let (best, value) = layer.best();
        layers.push(layer);
        values.push(value);
        witnesses.push(backtrack(&layers, best));
    }

    Ok(Profile {
        values,
        witnesses,
        nodes_expanded,
    })
}

/// Value of a concrete Alice walk: the best node of the last full layer,
/// extended along first out-edges and scored by Bob's best response.
fn cap_lower_bound<W: Weight>(
    s: &ScoreView<W>,
    g: &DirectedGraph,
    h: &DirectedGraph,
    prev: &Layer<W>,
    layers: &[Layer<W>],
    starts: &[usize],
    n: usize,
) -> W {
    let node = prev.best().0;
    let mut walk = backtrack(layers, node);
    let mut v = prev.vertex[node];
    while walk.len() < n {
        let e = g.out_edges(v)[0];
        walk.push(e);
        v = g.dst(e);
    }
    best_response(s, h, &walk, starts).0
}

fn start_vertices(instance: &GameInstance, start: &StartSpec) -> Result<(usize, usize)> {
    let r = instance.resolve_start(start)?;
    Ok((r.v0, r.u0))
}

/// `n`-round non-alternating value with Bob restricted to start in `starts`.
pub fn value_nonalt_finite_from(
    instance: &GameInstance,
    n: usize,
    v0: usize,
    starts: &[usize],
    opts: SearchOptions,
) -> Result<FiniteValueResult> {
    check_starts(&instance.graph_h, starts)?;
    let (g, h) = (&instance.graph_g, &instance.graph_h);
    with_scores!(instance, s => {
        let profile = nonalt_profile(&s, g, h, v0, starts, n, opts)?;
        let alice = profile.witnesses[n].clone();
        let (w, bob) = best_response(&s, h, &alice, starts);
        if w != profile.values[n] {
            return Err(Error::Internal("witness replay disagrees with search value".into()));
        }
        Ok(FiniteValueResult {
            rounds: n,
            value: s.value(w),
            witness_alice: Walk::new(alice),
            witness_bob: Walk::new(bob),
            nodes_expanded: profile.nodes_expanded,
            exact: true,
        })
    })
}

/// `n`-round non-alternating value from a start.
pub fn value_nonalt_finite(
    instance: &GameInstance,
    n: usize,
    start: &StartSpec,
) -> Result<FiniteValueResult> {
    value_nonalt_finite_with(instance, n, start, SearchOptions::default())
}

pub fn value_nonalt_finite_with(
    instance: &GameInstance,
    n: usize,
    start: &StartSpec,
    opts: SearchOptions,
) -> Result<FiniteValueResult> {
    let (v0, u0) = start_vertices(instance, start)?;
    value_nonalt_finite_from(instance, n, v0, &[u0], opts)
}

/// Non-alternating values for every horizon `0..=n` from one search.
pub fn nonalt_values_upto(
    instance: &GameInstance,
    n: usize,
    start: &StartSpec,
    opts: SearchOptions,
) -> Result<Vec<Value>> {
    let (v0, u0) = start_vertices(instance, start)?;
    with_scores!(instance, s => {
        let p = nonalt_profile(&s, &instance.graph_g, &instance.graph_h, v0, &[u0], n, opts)?;
        Ok(p.values.iter().map(|&w| s.value(w)).collect())
    })
}

/// Alternating values `V(k | v, u)` for all pairs, indexed `v * |V_H| + u`,
/// for `k = 0..=n`.
pub(crate) fn alt_tables<W: Weight>(
    s: &ScoreView<W>,
    g: &DirectedGraph,
    h: &DirectedGraph,
    n: usize,
) -> Vec<Vec<W>> {
    let nh = h.vertex_count();
    let pairs = g.vertex_count() * nh;
    let mut tables = vec![vec![W::ZERO; pairs]];
    for _ in 0..n {
        let prev = tables.last().unwrap();
        let next = (0..pairs)
            .map(|x| alt_step(s, g, h, prev, x / nh, x % nh))
            .collect();
        tables.push(next);
    }
    tables
}

/// One backward-induction step: Alice maximizes, then Bob minimizes.
#[inline]
pub(crate) fn alt_step<W: Weight>(
    s: &ScoreView<W>,
    g: &DirectedGraph,
    h: &DirectedGraph,
    prev: &[W],
    v: usize,
    u: usize,
) -> W {
    let nh = h.vertex_count();
    g.out_edges(v)
        .iter()
        .map(|&e| {
            h.out_edges(u)
                .iter()
                .map(|&f| s.get(e, f) + prev[g.dst(e) * nh + h.dst(f)])
                .reduce(W::min_w)
                .unwrap()
        })
        .reduce(W::max_w)
        .unwrap()
}

/// `n`-round alternating value by backward induction.
pub fn value_alt_finite(instance: &GameInstance, n: usize, start: &StartSpec) -> Result<Value> {
    let (v0, u0) = start_vertices(instance, start)?;
    let (g, h) = (&instance.graph_g, &instance.graph_h);
    Ok(with_scores!(instance, s => {
        let tables = alt_tables(&s, g, h, n);
        s.value(tables[n][v0 * h.vertex_count() + u0])
    }))
}

/// Every walk of length `n` from `v`, in lexicographic order.
pub fn enumerate_walks(graph: &DirectedGraph, v: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(g: &DirectedGraph, v: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for &e in g.out_edges(v) {
            cur.push(e);
            go(g, g.dst(e), left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(graph, v, n, &mut Vec::with_capacity(n), &mut out);
    out
}

fn brute_alt<W: Weight>(
    s: &ScoreView<W>,
    g: &DirectedGraph,
    h: &DirectedGraph,
    k: usize,
    v: usize,
    u: usize,
) -> W {
    if k == 0 {
        return W::ZERO;
    }
    g.out_edges(v)
        .iter()
        .map(|&e| {
            h.out_edges(u)
                .iter()
                .map(|&f| s.get(e, f) + brute_alt(s, g, h, k - 1, g.dst(e), h.dst(f)))
                .reduce(W::min_w)
                .unwrap()
        })
        .reduce(W::max_w)
        .unwrap()
}

/// Independent oracle: `(non-alternating, alternating)` by exhaustive
/// enumeration of walks and of the full game tree.
pub fn brute_values(instance: &GameInstance, n: usize, start: &StartSpec) -> Result<(Value, Value)> {
    brute_values_with_limit(instance, n, start, BRUTE_LIMIT)
}

/// [`brute_values`] with a caller-chosen bound on the walk-count product.
pub fn brute_values_with_limit(
    instance: &GameInstance,
    n: usize,
    start: &StartSpec,
    limit: u128,
) -> Result<(Value, Value)> {
    let (v0, u0) = start_vertices(instance, start)?;
    let (g, h) = (&instance.graph_g, &instance.graph_h);
    let count = g.count_walks(v0, n).saturating_mul(h.count_walks(u0, n));
    if count > limit {
        return Err(Error::EnumerationGuard { count, limit });
    }
    let alice = enumerate_walks(g, v0, n);
    let bob = enumerate_walks(h, u0, n);
    Ok(with_scores!(instance, s => {
        let nonalt = alice
            .iter()
            .map(|a| {
                bob.iter()
                    .map(|b| a.iter().zip(b).fold(Weight::ZERO, |acc, (&e, &f)| acc + s.get(e, f)))
                    .reduce(Weight::min_w)
                    .unwrap()
            })
            .reduce(Weight::max_w)
            .unwrap();
        let alt = brute_alt(&s, g, h, n, v0, u0);
        (s.value(nonalt), s.value(alt))
    }))
}

/// Checks a witness pair against a reported value.
pub fn replay_matches(instance: &GameInstance, result: &FiniteValueResult) -> Result<bool> {
    validate_walk(&instance.graph_g, &result.witness_alice.edges, None)?;
    validate_walk(&instance.graph_h, &result.witness_bob.edges, None)?;
    Ok(instance.replay(&result.witness_alice.edges, &result.witness_bob.edges) == result.value)
}
