//! Strongly connected structure: components, periods, product components
//! of `G x H`, and the padding constant `D` used by the block strategies.

use std::collections::VecDeque;

use num_integer::{gcd, lcm};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::instance::{GameInstance, StartSpec};

/// Partition of a graph's vertices into strongly connected components,
/// listed in topological order of the condensation (sources first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub component_of: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    /// A component is nontrivial when it contains a cycle.
    pub nontrivial: Vec<bool>,
}

impl Components {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Iterative Tarjan over adjacency lists.
pub fn scc(adj: &[Vec<usize>]) -> Components {
    let n = adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut next_child)) = call.last_mut() {
            if *next_child == 0 && index[v] == UNSEEN {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = adj[v].get(*next_child) {
                *next_child += 1;
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                found.push(comp);
            }
        }
    }

    // Tarjan emits sinks first.
    found.reverse();
    let mut component_of = vec![0; n];
    for (c, comp) in found.iter().enumerate() {
        for &v in comp {
            component_of[v] = c;
        }
    }
    let nontrivial = found
        .iter()
        .map(|comp| comp.len() > 1 || adj[comp[0]].contains(&comp[0]))
        .collect();
    Components {
        component_of,
        members: found,
        nontrivial,
    }
}

pub fn strongly_connected_components(graph: &DirectedGraph) -> Components {
    scc(&graph.successors())
}

/// Strongly connected and containing a cycle.
pub fn is_irreducible(graph: &DirectedGraph) -> bool {
    let comps = strongly_connected_components(graph);
    comps.len() == 1 && comps.nontrivial[0]
}

/// BFS depth labels inside one component; `None` outside it.
fn depths(adj: &[Vec<usize>], inside: &[bool], root: usize) -> Vec<Option<usize>> {
    let mut depth = vec![None; adj.len()];
    depth[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let d = depth[v].unwrap();
        for &w in &adj[v] {
            if inside[w] && depth[w].is_none() {
                depth[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    depth
}

/// gcd of `depth(src) + 1 - depth(dst)` over the component's internal edges.
fn period_of(adj: &[Vec<usize>], members: &[usize]) -> Option<(usize, Vec<Option<usize>>)> {
    let mut inside = vec![false; adj.len()];
    for &v in members {
        inside[v] = true;
    }
    let depth = depths(adj, &inside, members[0]);
    let mut p = 0usize;
    for &v in members {
        for &w in &adj[v] {
            if inside[w] {
                let (dv, dw) = (depth[v]? as i64, depth[w]? as i64);
                p = gcd(p, (dv + 1 - dw).unsigned_abs() as usize);
            }
        }
    }
    (p > 0).then_some((p, depth))
}

/// Period of a nontrivial component: gcd of all its cycle lengths.
pub fn period(graph: &DirectedGraph, component: &[usize]) -> Result<usize> {
    if component.is_empty() {
        return Err(Error::PeriodUndefined);
    }
    period_of(&graph.successors(), component)
        .map(|(p, _)| p)
        .ok_or(Error::PeriodUndefined)
}

/// Period of an irreducible graph.
pub fn graph_period(graph: &DirectedGraph) -> Result<usize> {
    let all: Vec<usize> = (0..graph.vertex_count()).collect();
    period(graph, &all)
}

/// Nontrivial strongly connected component of the vertex-pair product
/// graph `G x H`, with everything the block strategies need.
#[derive(Debug, Clone, Serialize)]
pub struct ProductComponent {
    /// Member vertex pairs `(v, u)`, sorted.
    pub members: Vec<(usize, usize)>,
    /// Edge pairs `(e, f)` whose endpoints both lie in the component.
    pub edge_pairs: Vec<(usize, usize)>,
    pub period: usize,
    /// Cyclic class (BFS depth mod period) of each member, aligned with `members`.
    pub classes: Vec<usize>,
    pub diameter: usize,
    pub padding: usize,
    #[serde(skip)]
    n_h: usize,
    #[serde(skip)]
    slot: Vec<Option<usize>>,
}

impl ProductComponent {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Position of `(v, u)` in `members`.
    pub fn index_of(&self, v: usize, u: usize) -> Option<usize> {
        self.slot[v * self.n_h + u]
    }

    pub fn contains(&self, v: usize, u: usize) -> bool {
        self.index_of(v, u).is_some()
    }

    pub fn class_of(&self, v: usize, u: usize) -> Option<usize> {
        self.index_of(v, u).map(|i| self.classes[i])
    }

    /// Members sharing a cyclic class with `(v, u)`.
    pub fn same_class(&self, v: usize, u: usize) -> Vec<(usize, usize)> {
        let Some(c) = self.class_of(v, u) else {
            return Vec::new();
        };
        self.members
            .iter()
            .zip(&self.classes)
            .filter(|(_, &k)| k == c)
            .map(|(&m, _)| m)
            .collect()
    }

    /// Local adjacency between members (indices into `members`).
    fn local_adjacency(&self, g: &DirectedGraph, h: &DirectedGraph) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.members.len()];
        for &(e, f) in &self.edge_pairs {
            let a = self.index_of(g.src(e), h.src(f)).unwrap();
            let b = self.index_of(g.dst(e), h.dst(f)).unwrap();
            adj[a].push(b);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}

fn product_adjacency(g: &DirectedGraph, h: &DirectedGraph) -> Vec<Vec<usize>> {
    let (ng, nh) = (g.vertex_count(), h.vertex_count());
    let (sg, sh) = (g.successors(), h.successors());
    let mut adj = vec![Vec::new(); ng * nh];
    for v in 0..ng {
        for u in 0..nh {
            let list = &mut adj[v * nh + u];
            for &v2 in &sg[v] {
                for &u2 in &sh[u] {
                    list.push(v2 * nh + u2);
                }
            }
        }
    }
    adj
}

/// Product component containing the vertex pair `(v0, u0)`.
pub fn product_component_at(
    g: &DirectedGraph,
    h: &DirectedGraph,
    v0: usize,
    u0: usize,
) -> Result<ProductComponent> {
    let nh = h.vertex_count();
    let adj = product_adjacency(g, h);
    let comps = scc(&adj);
    let c = comps.component_of[v0 * nh + u0];
    if !comps.nontrivial[c] {
        return Err(Error::TransientStart {
            g: g.vertex_name(v0).to_string(),
            h: h.vertex_name(u0).to_string(),
        });
    }
    let ids = &comps.members[c];
    let mut slot = vec![None; adj.len()];
    for (i, &x) in ids.iter().enumerate() {
        slot[x] = Some(i);
    }
    let members: Vec<(usize, usize)> = ids.iter().map(|&x| (x / nh, x % nh)).collect();

    let (p, depth) = period_of(&adj, ids).ok_or(Error::PeriodUndefined)?;
    let root_class = depth[v0 * nh + u0].unwrap() % p;
    let classes = ids
        .iter()
        .map(|&x| (depth[x].unwrap() + p - root_class) % p)
        .collect();

    let mut edge_pairs = Vec::new();
    for e in 0..g.edge_count() {
        for f in 0..h.edge_count() {
            let a = g.src(e) * nh + h.src(f);
            let b = g.dst(e) * nh + h.dst(f);
            if slot[a].is_some() && slot[b].is_some() {
                edge_pairs.push((e, f));
            }
        }
    }

    let mut comp = ProductComponent {
        members,
        edge_pairs,
        period: p,
        classes,
        diameter: 0,
        padding: 0,
        n_h: nh,
        slot,
    };
    let local = comp.local_adjacency(g, h);
    comp.diameter = diameter(&local);
    comp.padding = saturation_exponent(&local, &comp.classes, p)?;
    Ok(comp)
}

/// Product component of a start (edge starts resolve to terminal vertices).
pub fn product_component(instance: &GameInstance, start: &StartSpec) -> Result<ProductComponent> {
    let s = instance.resolve_start(start)?;
    product_component_at(&instance.graph_g, &instance.graph_h, s.v0, s.u0)
}

/// The padding constant `D` of a product component.
pub fn padding_constant(component: &ProductComponent) -> usize {
    component.padding
}

fn diameter(adj: &[Vec<usize>]) -> usize {
    let inside = vec![true; adj.len()];
    (0..adj.len())
        .map(|s| {
            depths(adj, &inside, s)
                .into_iter()
                .map(|d| d.unwrap_or(0))
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

#[derive(Clone, PartialEq, Eq)]
struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn zeros(n: usize) -> Self {
        let words = n.div_ceil(64);
        Self {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    fn from_adjacency(adj: &[Vec<usize>]) -> Self {
        let mut m = Self::zeros(adj.len());
        for (i, row) in adj.iter().enumerate() {
            for &j in row {
                m.set(i, j);
            }
        }
        m
    }

    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    fn mul(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.n);
        for i in 0..self.n {
            let mut acc = vec![0u64; self.words];
            for j in 0..self.n {
                if self.get(i, j) {
                    for (a, b) in acc.iter_mut().zip(other.row(j)) {
                        *a |= b;
                    }
                }
            }
            out.bits[i * self.words..(i + 1) * self.words].copy_from_slice(&acc);
        }
        out
    }
}

/// Smallest `D` such that the `p`-step relation raised to `D` connects every
/// pair of members in the same cyclic class.
fn saturation_exponent(adj: &[Vec<usize>], classes: &[usize], p: usize) -> Result<usize> {
    let m = adj.len();
    let one = BitMatrix::from_adjacency(adj);
    let mut step = one.clone();
    for _ in 1..p {
        step = step.mul(&one);
    }
    let saturated = |mat: &BitMatrix| {
        (0..m).all(|i| (0..m).all(|j| classes[i] != classes[j] || mat.get(i, j)))
    };
    let wielandt = (m - 1) * (m - 1) + 1;
    let mut power = step.clone();
    for d in 1..=wielandt {
        if saturated(&power) {
            return Ok(d);
        }
        power = power.mul(&step);
    }
    Err(Error::Internal(format!(
        "padding constant exceeds the Wielandt bound {wielandt}"
    )))
}

/// Lexicographically first walk of exactly `len` edges from `from` to `to`.
///
/// With `last_edge`, walks ending in that edge are preferred.
pub fn fixed_length_walk(
    graph: &DirectedGraph,
    from: usize,
    to: usize,
    len: usize,
    last_edge: Option<usize>,
) -> Option<Vec<usize>> {
    if let Some(e) = last_edge {
        if len >= 1 && graph.dst(e) == to {
            if let Some(mut w) = fixed_length_walk(graph, from, graph.src(e), len - 1, None) {
                w.push(e);
                return Some(w);
            }
        }
    }
    let n = graph.vertex_count();
    // reach[j][v]: `to` is reachable from v in exactly j steps
    let mut reach = vec![vec![false; n]; len + 1];
    reach[0][to] = true;
    for j in 1..=len {
        for v in 0..n {
            reach[j][v] = graph
                .out_edges(v)
                .iter()
                .any(|&e| reach[j - 1][graph.dst(e)]);
        }
    }
    if !reach[len][from] {
        return None;
    }
    let mut walk = Vec::with_capacity(len);
    let mut v = from;
    for j in (1..=len).rev() {
        let e = *graph
            .out_edges(v)
            .iter()
            .find(|&&e| reach[j - 1][graph.dst(e)])?;
        walk.push(e);
        v = graph.dst(e);
    }
    Some(walk)
}

/// `lcm(per(G), per(H))` for irreducible factors.
pub fn factor_period_lcm(g: &DirectedGraph, h: &DirectedGraph) -> Result<usize> {
    Ok(lcm(graph_period(g)?, graph_period(h)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeSpec;
    use crate::instance::{Score, ScoreSpec};

    fn graph(vertices: &[&str], edges: &[(&str, &str)]) -> DirectedGraph {
        let specs = edges
            .iter()
            .map(|(a, b)| EdgeSpec::new(format!("{a}{b}"), *a, *b))
            .collect();
        DirectedGraph::new("G", vertices, specs).unwrap()
    }

    fn loop1() -> DirectedGraph {
        graph(&["o"], &[("o", "o")])
    }

    fn cycle3() -> DirectedGraph {
        graph(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")])
    }

    #[test]
    fn three_cycle_is_one_nontrivial_component() {
        let comps = strongly_connected_components(&cycle3());
        assert_eq!(comps.len(), 1);
        assert!(comps.nontrivial[0]);
        assert_eq!(graph_period(&cycle3()).unwrap(), 3);
    }

    #[test]
    fn reducible_components_in_topological_order() {
        // X <- Y -> Z with loops at X and Z
        let h = graph(&["X", "Y", "Z"], &[("Y", "X"), ("Y", "Z"), ("X", "X"), ("Z", "Z")]);
        let comps = strongly_connected_components(&h);
        assert_eq!(comps.len(), 3);
        let y = comps.component_of[1];
        assert_eq!(y, 0, "Y is the source component");
        assert!(!comps.nontrivial[y]);
        assert!(comps.nontrivial[comps.component_of[0]]);
        assert!(comps.nontrivial[comps.component_of[2]]);
        assert_eq!(period(&h, &[1]).unwrap_err(), Error::PeriodUndefined);
    }

    #[test]
    fn period_of_cycles_sharing_a_vertex() {
        // 4-cycle a b c d and 6-cycle a e f g h i sharing a
        let g = graph(
            &["a", "b", "c", "d", "e", "f", "g", "h", "i"],
            &[
                ("a", "b"),
                ("b", "c"),
                ("c", "d"),
                ("d", "a"),
                ("a", "e"),
                ("e", "f"),
                ("f", "g"),
                ("g", "h"),
                ("h", "i"),
                ("i", "a"),
            ],
        );
        assert_eq!(graph_period(&g).unwrap(), 2);
        assert_eq!(graph_period(&loop1()).unwrap(), 1);
    }

    fn instance(g: DirectedGraph, h: DirectedGraph) -> GameInstance {
        GameInstance::new(g, h, ScoreSpec::with_default(Score::integer(0))).unwrap()
    }

    #[test]
    fn loops_give_trivial_padding() {
        let inst = instance(loop1(), loop1());
        let comp = product_component(&inst, &StartSpec::vertices("o", "o")).unwrap();
        assert_eq!((comp.len(), comp.period, comp.diameter, comp.padding), (1, 1, 0, 1));
    }

    #[test]
    fn product_of_three_cycles() {
        let inst = instance(cycle3(), cycle3());
        let comp = product_component(&inst, &StartSpec::vertices("a", "a")).unwrap();
        assert_eq!(comp.period, 3);
        assert_eq!(comp.len(), 3);
        assert_eq!(comp.padding, 1);
        assert_eq!(comp.edge_pairs.len(), 3);
    }

    #[test]
    fn complete_graph_with_loops_has_unit_padding() {
        let names = ["a", "b", "c"];
        let mut edges = Vec::new();
        for a in names {
            for b in names {
                edges.push((a, b));
            }
        }
        let g = graph(&names, &edges);
        let inst = instance(g, loop1());
        let comp = product_component(&inst, &StartSpec::vertices("a", "o")).unwrap();
        assert_eq!((comp.period, comp.padding), (1, 1));
    }

    #[test]
    fn transient_start_rejected() {
        let h = graph(&["X", "Y"], &[("Y", "X"), ("X", "X")]);
        let inst = instance(loop1(), h);
        let err = product_component(&inst, &StartSpec::vertices("o", "Y")).unwrap_err();
        assert!(matches!(err, Error::TransientStart { .. }));
    }

    #[test]
    fn fixed_length_walks() {
        let g = cycle3();
        assert_eq!(fixed_length_walk(&g, 0, 0, 3, None).unwrap().len(), 3);
        assert!(fixed_length_walk(&g, 0, 0, 4, None).is_none());
        let complete = graph(&["a", "b"], &[("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")]);
        let last = complete.edge_by_id("ba").unwrap();
        let w = fixed_length_walk(&complete, 0, 0, 3, Some(last)).unwrap();
        assert_eq!(*w.last().unwrap(), last);
        crate::graph::validate_walk(&complete, &w, Some(0)).unwrap();
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> DirectedGraph {
            let names: Vec<String> = (0..n).map(|v| format!("v{v}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let specs = arcs
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| EdgeSpec::new(format!("e{i}"), &names[a], &names[b]))
                .collect();
            DirectedGraph::new("G", &refs, specs).unwrap()
        }

        /// Hamiltonian cycle plus extra arcs, so always strongly connected.
        fn strongly_connected(max_v: usize, max_extra: usize) -> impl Strategy<Value = DirectedGraph> {
            (1..=max_v).prop_flat_map(move |n| {
                proptest::collection::vec((0..n, 0..n), 0..=max_extra).prop_map(move |extra| {
                    let mut arcs: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
                    arcs.extend(extra);
                    from_arcs(n, &arcs)
                })
            })
        }

        fn gcd(a: usize, b: usize) -> usize {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }

        /// Lengths of all simple cycles, each rooted at its smallest vertex.
        fn simple_cycle_lengths(adj: &[Vec<usize>]) -> Vec<usize> {
            fn go(root: usize, v: usize, len: usize, seen: &mut [bool], adj: &[Vec<usize>], out: &mut Vec<usize>) {
                for &w in &adj[v] {
                    if w == root {
                        out.push(len + 1);
                    } else if w > root && !seen[w] {
                        seen[w] = true;
                        go(root, w, len + 1, seen, adj, out);
                        seen[w] = false;
                    }
                }
            }
            let mut out = Vec::new();
            for root in 0..adj.len() {
                let mut seen = vec![false; adj.len()];
                go(root, root, 0, &mut seen, adj, &mut out);
            }
            out
        }

        /// `reach[l][i]`: members reachable from member `i` by walks of exactly `l` edges.
        fn reach_sets(adj: &[Vec<usize>], max_len: usize) -> Vec<Vec<Vec<bool>>> {
            let n = adj.len();
            let mut out = Vec::with_capacity(max_len + 1);
            let mut cur: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
            out.push(cur.clone());
            for _ in 0..max_len {
                let next: Vec<Vec<bool>> = cur
                    .iter()
                    .map(|row| {
                        let mut r = vec![false; n];
                        for (j, _) in row.iter().enumerate().filter(|(_, &x)| x) {
                            for &k in &adj[j] {
                                r[k] = true;
                            }
                        }
                        r
                    })
                    .collect();
                out.push(next.clone());
                cur = next;
            }
            out
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]

            #[test]
            fn period_is_gcd_of_cycle_lengths(g in strongly_connected(8, 4)) {
                let lengths = simple_cycle_lengths(&g.successors());
                let want = lengths.iter().fold(0, |a, &b| gcd(a, b));
                let p = graph_period(&g).unwrap();
                prop_assert_eq!(p, want);
                prop_assert!(lengths.iter().all(|l| l % p == 0));
            }

            #[test]
            fn padding_gives_walks_of_every_long_length(
                g in strongly_connected(3, 3),
                h in strongly_connected(2, 2),
            ) {
                let comp = product_component_at(&g, &h, 0, 0).unwrap();
                prop_assume!(comp.len() <= 6);
                let (p, d) = (comp.period, comp.padding);
                let adj = comp.local_adjacency(&g, &h);
                let reach = reach_sets(&adj, p * d + 3 * p);
                let m = comp.len();
                let same = |i: usize, j: usize| comp.classes[i] == comp.classes[j];
                for len in (p * d..=p * d + 3 * p).step_by(p) {
                    for i in 0..m {
                        for j in (0..m).filter(|&j| same(i, j)) {
                            prop_assert!(reach[len][i][j], "no walk of length {} from {} to {}", len, i, j);
                        }
                    }
                }
                // minimality
                if d > 1 {
                    let len = p * (d - 1);
                    let all = (0..m).all(|i| (0..m).filter(|&j| same(i, j)).all(|j| reach[len][i][j]));
                    prop_assert!(!all, "D = {} is not minimal", d);
                }
            }

            #[test]
            fn product_period_is_lcm_of_factor_periods(
                g in strongly_connected(4, 3),
                h in strongly_connected(4, 3),
            ) {
                let want = factor_period_lcm(&g, &h).unwrap();
                let comp = product_component_at(&g, &h, 0, 0).unwrap();
                prop_assert_eq!(comp.period, want);
                // closed walks at the root member, by brute force
                let adj = comp.local_adjacency(&g, &h);
                let bound = 2 * comp.len() * comp.len() + 2;
                let reach = reach_sets(&adj, bound);
                let root = comp.index_of(0, 0).unwrap();
                let brute = (1..=bound).filter(|&l| reach[l][root][root]).fold(0, gcd);
                prop_assert_eq!(brute, want);
            }
        }
    }
}
