//! Constrained binary codes as games.
//!
//! A set `F` of forbidden `k`-bit patterns defines the code `C_n` of length-`n`
//! words with no forbidden window. Bob walks the follower graph of the
//! constraint (vertices are `(k-1)`-bit contexts, edges are allowed windows
//! labeled by their last bit), Alice walks a free one-vertex bit graph, and a
//! round scores 1 when the two bits differ. Bob may start anywhere, so the
//! `n`-round non-alternating value is the covering radius of the trimmed
//! system's length-`n` words.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::asymptotic::{value_nonalt_bounds_free, NonAltBounds};
use crate::error::{Error, Result};
use crate::finite::{value_nonalt_finite_from, SearchOptions};
use crate::graph::{DirectedGraph, EdgeSpec};
use crate::instance::{GameInstance, Score, ScoreSpec};
use crate::structure::strongly_connected_components;

/// Brute force refuses beyond `2^n * |C_n|` pairs.
pub const BRUTE_LIMIT: u128 = 100_000_000;

/// Name of the single follower vertex when `k = 1`.
pub const EMPTY_CONTEXT: &str = "ε";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForbiddenSet {
    pub k: usize,
    pub patterns: BTreeSet<String>,
}

impl ForbiddenSet {
    pub fn new<S: AsRef<str>>(k: usize, patterns: &[S]) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidPatterns("pattern length must be at least 1".into()));
        }
        let mut set = BTreeSet::new();
        for p in patterns {
            let p = p.as_ref().trim();
            if p.len() != k || !p.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(Error::InvalidPatterns(format!(
                    "{p:?} is not a {k}-bit binary word"
                )));
            }
            set.insert(p.to_string());
        }
        Ok(Self { k, patterns: set })
    }

    /// Parses `"11"` or `"00,11"`; the empty list needs an explicit `k`.
    pub fn parse(text: &str, k: Option<usize>) -> Result<Self> {
        let items: Vec<&str> = text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        let k = match (items.first(), k) {
            (Some(first), None) => first.len(),
            (_, Some(k)) => k,
            (None, None) => {
                return Err(Error::InvalidPatterns(
                    "an empty pattern set needs an explicit length k".into(),
                ))
            }
        };
        Self::new(k, &items)
    }

    pub fn empty(k: usize) -> Result<Self> {
        Self::new::<&str>(k, &[])
    }

    pub fn forbids(&self, window: &str) -> bool {
        self.patterns.contains(window)
    }

    /// True when no `k`-window of `word` is forbidden.
    pub fn allows(&self, word: &str) -> bool {
        word.len() < self.k
            || (0..=word.len() - self.k).all(|i| !self.forbids(&word[i..i + self.k]))
    }
}

#[derive(Debug, Clone)]
pub struct ConstrainedSystem {
    pub forbidden: ForbiddenSet,
    /// Bob's follower graph, trimmed to its bi-extendable part.
    pub follower: DirectedGraph,
    /// Alice's free bit graph.
    pub alice: DirectedGraph,
    pub instance: GameInstance,
}

fn bits(value: usize, len: usize) -> String {
    (0..len)
        .rev()
        .map(|i| if value >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn context_name(word: &str) -> String {
    if word.is_empty() {
        EMPTY_CONTEXT.to_string()
    } else {
        word.to_string()
    }
}

pub fn build_constrained_system(forbidden: &ForbiddenSet) -> Result<ConstrainedSystem> {
    let k = forbidden.k;
    let windows: Vec<String> = (0..1usize << k)
        .map(|w| bits(w, k))
        .filter(|w| !forbidden.forbids(w))
        .collect();
    let mut alive: BTreeSet<String> = (0..1usize << (k - 1)).map(|v| bits(v, k - 1)).collect();
    let mut live_windows: Vec<&String> = windows.iter().collect();
    loop {
        live_windows.retain(|w| alive.contains(&w[..k - 1]) && alive.contains(&w[1..]));
        let has_out: BTreeSet<&str> = live_windows.iter().map(|w| &w[..k - 1]).collect();
        let has_in: BTreeSet<&str> = live_windows.iter().map(|w| &w[1..]).collect();
        let next: BTreeSet<String> = alive
            .iter()
            .filter(|v| has_out.contains(v.as_str()) && has_in.contains(v.as_str()))
            .cloned()
            .collect();
        if next.len() == alive.len() {
            break;
        }
        alive = next;
    }
    if alive.is_empty() {
        return Err(Error::EmptyConstrainedSystem);
    }

    let vertices: Vec<String> = alive.iter().map(|v| context_name(v)).collect();
    let edges = live_windows
        .iter()
        .map(|w| {
            let bit = w.as_bytes()[k - 1] - b'0';
            EdgeSpec::new(w.as_str(), context_name(&w[..k - 1]), context_name(&w[1..])).labeled(bit)
        })
        .collect();
    let follower = DirectedGraph::from_specs("H", vertices, edges)?;
    let alice = DirectedGraph::new(
        "G",
        &["A"],
        vec![
            EdgeSpec::new("a0", "A", "A").labeled(0),
            EdgeSpec::new("a1", "A", "A").labeled(1),
        ],
    )?;

    let mut spec = ScoreSpec::with_default(Score::integer(0));
    for a in alice.edges() {
        for f in follower.edges() {
            if a.label != f.label {
                spec.set(&a.id, &f.id, Score::integer(1));
            }
        }
    }
    let instance = GameInstance::new(alice.clone(), follower.clone(), spec)?;
    Ok(ConstrainedSystem {
        forbidden: forbidden.clone(),
        follower,
        alice,
        instance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusMode {
    Game,
    Brute,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoveringRadiusResult {
    pub n: usize,
    pub radius: usize,
    pub witness_u: String,
    pub mode: RadiusMode,
}

/// Covering radius of `C_n`, via the game when `n >= k - 1`.
pub fn covering_radius(forbidden: &ForbiddenSet, n: usize) -> Result<CoveringRadiusResult> {
    if n < forbidden.k - 1 {
        return brute_covering_radius(forbidden, n);
    }
    let system = build_constrained_system(forbidden)?;
    let starts: Vec<usize> = (0..system.follower.vertex_count()).collect();
    let res = value_nonalt_finite_from(&system.instance, n, 0, &starts, SearchOptions::default())?;
    let radius = res
        .value
        .as_exact()
        .filter(|r| r.is_integer() && *r.numer() >= 0)
        .ok_or_else(|| Error::Internal(format!("non-integral radius {}", res.value)))?;
    let witness_u = res
        .witness_alice
        .labels(&system.alice)
        .expect("alice edges are labeled")
        .iter()
        .map(|b| char::from(b'0' + b))
        .collect();
    Ok(CoveringRadiusResult {
        n,
        radius: *radius.numer() as usize,
        witness_u,
        mode: RadiusMode::Game,
    })
}

/// All words of `C_n`, as `n`-bit integers (first letter most significant).
pub fn code_words(forbidden: &ForbiddenSet, n: usize) -> Vec<u64> {
    let k = forbidden.k;
    let bad: Vec<u64> = forbidden
        .patterns
        .iter()
        .map(|p| u64::from_str_radix(p, 2).unwrap())
        .collect();
    let mask = (1u64 << k) - 1;
    (0..1u64 << n)
        .filter(|&w| n < k || (0..=n - k).all(|i| !bad.contains(&(w >> i & mask))))
        .collect()
}

/// Exhaustive `max_u min_{w in C_n} d_H(u, w)`.
pub fn brute_covering_radius(forbidden: &ForbiddenSet, n: usize) -> Result<CoveringRadiusResult> {
    // 2^n alone already exceeds the limit
    if n >= 27 {
        return Err(Error::EnumerationGuard {
            count: 1u128 << n,
            limit: BRUTE_LIMIT,
        });
    }
    let words = code_words(forbidden, n);
    let count = (1u128 << n) * words.len() as u128;
    if count > BRUTE_LIMIT {
        return Err(Error::EnumerationGuard {
            count,
            limit: BRUTE_LIMIT,
        });
    }
    if words.is_empty() {
        return Err(Error::EmptyCode(n));
    }
    let mut best = (0u32, 0u64);
    for u in 0..1u64 << n {
        let d = words.iter().map(|&w| (u ^ w).count_ones()).min().unwrap();
        if d > best.0 {
            best = (d, u);
        }
    }
    Ok(CoveringRadiusResult {
        n,
        radius: best.0 as usize,
        witness_u: bits(best.1 as usize, n),
        mode: RadiusMode::Brute,
    })
}

/// Bounds on `lim R(C_n) / n`.
pub fn asymptotic_covering_radius_bounds(
    forbidden: &ForbiddenSet,
    budget: usize,
) -> Result<NonAltBounds> {
    let system = build_constrained_system(forbidden)?;
    let comps = strongly_connected_components(&system.follower);
    if comps.len() != 1 || !comps.nontrivial[0] {
        let listing: Vec<String> = comps
            .members
            .iter()
            .map(|c| {
                let names: Vec<&str> = c.iter().map(|&v| system.follower.vertex_name(v)).collect();
                format!("{{{}}}", names.join(","))
            })
            .collect();
        return Err(Error::Hypothesis(format!(
            "per-component analysis unsupported: follower graph components {}",
            listing.join(" ")
        )));
    }
    value_nonalt_bounds_free(&system.instance, 0, budget, SearchOptions::default())
}

/// Words spelled by follower walks of length `n - (k - 1)`, each prefixed by
/// its start context.
pub fn spelled_words(system: &ConstrainedSystem, n: usize) -> BTreeSet<String> {
    let h = &system.follower;
    let k = system.forbidden.k;
    let mut out = BTreeSet::new();
    for v in 0..h.vertex_count() {
        let ctx = match h.vertex_name(v) {
            EMPTY_CONTEXT => String::new(),
            name => name.to_string(),
        };
        for walk in crate::finite::enumerate_walks(h, v, n + 1 - k) {
            let mut word = ctx.clone();
            word.extend(walk.iter().map(|&e| char::from(b'0' + h.edge(e).label.unwrap())));
            out.insert(word);
        }
    }
    out
}
