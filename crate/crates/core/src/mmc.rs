//! Maximum mean cycle by Karp's recurrence, run per strongly connected
//! component.

use num_rational::Rational64;

use crate::error::Result;
use crate::structure::scc;
use crate::value::{common_scale, Value, Weight};

/// An optimal cycle: total weight `sum` over `edges.len()` edges.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCycle<W> {
    pub sum: W,
    pub edges: Vec<usize>,
}

impl<W: Weight> MeanCycle<W> {
    pub fn mean(&self, scale: i64) -> Value {
        W::ratio(self.sum, self.edges.len() as i64, scale)
    }
}

/// Maximum mean cycle of a weighted multigraph given as `(src, dst, weight)`
/// triples. `None` when the graph is acyclic.
pub fn max_mean_cycle_w<W: Weight>(n: usize, edges: &[(usize, usize, W)]) -> Option<MeanCycle<W>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b, _) in edges {
        adj[a].push(b);
    }
    let comps = scc(&adj);
    let mut best: Option<MeanCycle<W>> = None;
    for (c, members) in comps.members.iter().enumerate() {
        if !comps.nontrivial[c] {
            continue;
        }
        let local: Vec<usize> = (0..edges.len())
            .filter(|&i| {
                comps.component_of[edges[i].0] == c && comps.component_of[edges[i].1] == c
            })
            .collect();
        let cand = karp_component(n, members, edges, &local);
        if best
            .as_ref()
            .is_none_or(|b| better(cand.sum, cand.edges.len(), b.sum, b.edges.len()))
        {
            best = Some(cand);
        }
    }
    best
}

/// `a / la > b / lb`
fn better<W: Weight>(a: W, la: usize, b: W, lb: usize) -> bool {
    W::ratio(a, la as i64, 1) > W::ratio(b, lb as i64, 1)
}

fn karp_component<W: Weight>(
    n: usize,
    members: &[usize],
    edges: &[(usize, usize, W)],
    local: &[usize],
) -> MeanCycle<W> {
    let m = members.len();
    let source = members[0];
    // best[k][v]: heaviest walk of exactly k edges from source to v, with its last edge
    let mut best: Vec<Vec<Option<(W, usize)>>> = vec![vec![None; n]; m + 1];
    best[0][source] = Some((W::ZERO, usize::MAX));
    for k in 1..=m {
        for &i in local {
            let (a, b, w) = edges[i];
            if let Some((d, _)) = best[k - 1][a] {
                let cand = d + w;
                if best[k][b].is_none_or(|(old, _)| cand > old) {
                    best[k][b] = Some((cand, i));
                }
            }
        }
    }

    // Karp: max over v of min over k of (D_m(v) - D_k(v)) / (m - k)
    let mut target: Option<(usize, W, usize)> = None;
    for &v in members {
        let Some((dm, _)) = best[m][v] else { continue };
        let mut worst: Option<(W, usize)> = None;
        for (k, row) in best.iter().enumerate().take(m) {
            if let Some((dk, _)) = row[v] {
                let cand = (dm - dk, m - k);
                if worst.is_none_or(|(ws, wl)| better(ws, wl, cand.0, cand.1)) {
                    worst = Some(cand);
                }
            }
        }
        if let Some((ws, wl)) = worst {
            if target.is_none_or(|(_, ts, tl)| better(ws, wl, ts, tl)) {
                target = Some((v, ws, wl));
            }
        }
    }
    let (v, _, _) = target.expect("a nontrivial component has a walk of every length");

    // the optimal walk into v contains an optimal cycle
    let mut walk = Vec::with_capacity(m);
    let mut at = v;
    for k in (1..=m).rev() {
        let (_, e) = best[k][at].unwrap();
        walk.push(e);
        at = edges[e].0;
    }
    walk.reverse();
    best_closed_segment(&walk, edges)
}

fn best_closed_segment<W: Weight>(walk: &[usize], edges: &[(usize, usize, W)]) -> MeanCycle<W> {
    let mut prefix = vec![W::ZERO];
    for &e in walk {
        prefix.push(*prefix.last().unwrap() + edges[e].2);
    }
    let vertex_at = |i: usize| {
        if i == 0 {
            edges[walk[0]].0
        } else {
            edges[walk[i - 1]].1
        }
    };
    let mut best: Option<(usize, usize)> = None;
    for i in 0..walk.len() {
        for j in i + 1..=walk.len() {
            if vertex_at(i) != vertex_at(j) {
                continue;
            }
            let sum = prefix[j] - prefix[i];
            if best.is_none_or(|(bi, bj)| better(sum, j - i, prefix[bj] - prefix[bi], bj - bi)) {
                best = Some((i, j));
            }
        }
    }
    let (i, j) = best.expect("a walk of m edges repeats a vertex");
    MeanCycle {
        sum: prefix[j] - prefix[i],
        edges: walk[i..j].to_vec(),
    }
}

/// Exact maximum mean cycle over rational weights.
pub fn max_mean_cycle(
    n: usize,
    edges: &[(usize, usize, Rational64)],
) -> Result<Option<(Rational64, Vec<usize>)>> {
    let weights: Vec<Rational64> = edges.iter().map(|e| e.2).collect();
    let (scaled, scale) = common_scale(&weights)?;
    let triples: Vec<(usize, usize, i64)> = edges
        .iter()
        .zip(scaled)
        .map(|(&(a, b, _), w)| (a, b, w))
        .collect();
    Ok(max_mean_cycle_w(n, &triples).map(|c| {
        let mean = c.mean(scale).as_exact().unwrap();
        (mean, c.edges)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn self_loop() {
        let (mean, cyc) = max_mean_cycle(1, &[(0, 0, q(1))]).unwrap().unwrap();
        assert_eq!((mean, cyc), (q(1), vec![0]));
    }

    #[test]
    fn two_cycle_against_loop() {
        let edges = [(0, 1, q(3)), (1, 0, q(1)), (0, 0, q(2))];
        let (mean, _) = max_mean_cycle(2, &edges).unwrap().unwrap();
        assert_eq!(mean, q(2));
        let edges = [(0, 1, q(3)), (1, 0, q(2)), (0, 0, q(2))];
        let (mean, cyc) = max_mean_cycle(2, &edges).unwrap().unwrap();
        assert_eq!((mean, cyc.len()), (Rational64::new(5, 2), 2));
    }

    #[test]
    fn acyclic_has_none() {
        assert!(max_mean_cycle(2, &[(0, 1, q(1))]).unwrap().is_none());
    }

    fn simple_cycle_means(n: usize, edges: &[(usize, usize, i64)]) -> Vec<Rational64> {
        // DFS over simple cycles rooted at their smallest vertex
        fn go(
            root: usize,
            v: usize,
            sum: i64,
            len: i64,
            seen: &mut Vec<bool>,
            edges: &[(usize, usize, i64)],
            out: &mut Vec<Rational64>,
        ) {
            for &(a, b, w) in edges {
                if a != v {
                    continue;
                }
                if b == root {
                    out.push(Rational64::new(sum + w, len + 1));
                } else if b > root && !seen[b] {
                    seen[b] = true;
                    go(root, b, sum + w, len + 1, seen, edges, out);
                    seen[b] = false;
                }
            }
        }
        let mut out = Vec::new();
        for root in 0..n {
            let mut seen = vec![false; n];
            seen[root] = true;
            go(root, root, 0, 0, &mut seen, edges, &mut out);
        }
        out
    }

    proptest! {
        #[test]
        fn karp_matches_cycle_enumeration(
            n in 1usize..=5,
            raw in proptest::collection::vec((0usize..5, 0usize..5, -5i64..=5), 1..10),
        ) {
            let edges: Vec<(usize, usize, i64)> = raw.into_iter().map(|(a, b, w)| (a % n, b % n, w)).collect();
            let expected = simple_cycle_means(n, &edges).into_iter().max();
            let got = max_mean_cycle_w(n, &edges);
            match (expected, got) {
                (None, None) => {}
                (Some(want), Some(c)) => {
                    prop_assert_eq!(c.mean(1).as_exact().unwrap(), want);
                    let closes = edges[c.edges[0]].0 == edges[*c.edges.last().unwrap()].1;
                    prop_assert!(closes);
                    for pair in c.edges.windows(2) {
                        prop_assert_eq!(edges[pair[0]].1, edges[pair[1]].0);
                    }
                }
                (e, g) => prop_assert!(false, "expected {:?}, got {:?}", e, g),
            }
        }
    }
}
