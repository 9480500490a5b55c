//! Seeded random instances for the integration suites.

#![allow(dead_code)]

use mpg_duel::graph::{DirectedGraph, EdgeSpec};
use mpg_duel::instance::{GameInstance, Score, ScoreSpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn build(name: &str, n: usize, arcs: &[(usize, usize)]) -> DirectedGraph {
    let vertices: Vec<String> = (0..n).map(|v| format!("{name}{v}")).collect();
    let refs: Vec<&str> = vertices.iter().map(String::as_str).collect();
    let edges = arcs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| EdgeSpec::new(format!("{name}e{i}"), &vertices[a], &vertices[b]))
        .collect();
    DirectedGraph::new(name, &refs, edges).unwrap()
}

/// Sink-free graph with at most `max_v` vertices and `max_e` edges.
pub fn sink_free(rng: &mut ChaCha8Rng, name: &str, max_v: usize, max_e: usize) -> DirectedGraph {
    let n = rng.gen_range(1..=max_v);
    let mut arcs: Vec<(usize, usize)> = (0..n).map(|v| (v, rng.gen_range(0..n))).collect();
    let total = rng.gen_range(n..=max_e.max(n));
    while arcs.len() < total {
        arcs.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    build(name, n, &arcs)
}

/// Strongly connected graph: a Hamiltonian cycle plus random chords.
pub fn irreducible(rng: &mut ChaCha8Rng, name: &str, n: usize, max_e: usize) -> DirectedGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut arcs: Vec<(usize, usize)> = (0..n).map(|i| (order[i], order[(i + 1) % n])).collect();
    let total = rng.gen_range(n..=max_e.max(n));
    while arcs.len() < total {
        arcs.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    build(name, n, &arcs)
}

/// A single directed cycle of length `n`.
pub fn cycle(name: &str, n: usize) -> DirectedGraph {
    let arcs: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    build(name, n, &arcs)
}

/// Integer scores drawn uniformly from `-bound..=bound`.
pub fn with_scores(rng: &mut ChaCha8Rng, g: DirectedGraph, h: DirectedGraph, bound: i64) -> GameInstance {
    let mut spec = ScoreSpec::with_default(Score::integer(0));
    for e in g.edges() {
        for f in h.edges() {
            spec.set(&e.id, &f.id, Score::integer(rng.gen_range(-bound..=bound)));
        }
    }
    GameInstance::new(g, h, spec).unwrap()
}
