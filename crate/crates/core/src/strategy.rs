//! Block-schedule equilibrium strategies as lazy edge streams, and the
//! simulator that plays two streams against each other.
//!
//! Alice's walk is fixed before Bob moves, so the simulator draws Alice's
//! edges ahead of Bob's as far as Bob's stream asks for them.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite::{best_response, nonalt_profile, SearchOptions};
use crate::graph::DirectedGraph;
use crate::instance::{GameInstance, StartSpec};
use crate::structure::{fixed_length_walk, is_irreducible, product_component_at, ProductComponent};
use crate::value::Value;
use crate::with_scores;

/// Blocks `(a_k, b_k]` of length `p k`, separated by fills of length `p D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockSchedule {
    pub p: usize,
    pub d: usize,
}

/// Where a (1-based) step falls in a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Block { k: usize, offset: usize },
    Fill { k: usize, offset: usize },
}

impl BlockSchedule {
    pub fn new(p: usize, d: usize) -> Self {
        assert!(p >= 1 && d >= 1, "period and padding are positive");
        Self { p, d }
    }

    /// `a_k` for `k >= 1`.
    pub fn a(&self, k: usize) -> usize {
        let j = k - 1;
        self.p * (j * (j + 1) / 2) + j * self.p * self.d
    }

    /// `b_k = a_k + p k`.
    pub fn b(&self, k: usize) -> usize {
        self.a(k) + self.p * k
    }

    /// Phase of step `t >= 1`; offsets are 0-based.
    pub fn locate(&self, t: usize) -> Phase {
        let mut k = 1;
        while self.a(k + 1) < t {
            k += 1;
        }
        let (a, b) = (self.a(k), self.b(k));
        if t <= b {
            Phase::Block { k, offset: t - a - 1 }
        } else {
            Phase::Fill { k, offset: t - b - 1 }
        }
    }

    pub fn fill_len(&self) -> usize {
        self.p * self.d
    }
}

pub fn block_schedule(component: &ProductComponent) -> BlockSchedule {
    BlockSchedule::new(component.period, component.padding)
}

/// A stream of Bob's edges that may look at Alice's future edges.
pub trait BobStream {
    /// Number of Alice edges needed before Bob's edge at step `t` (1-based).
    fn lookahead(&self, t: usize) -> usize;

    /// Bob's next edge; `alice` holds at least `lookahead(t)` edges.
    fn next_edge(&mut self, alice: &[usize]) -> Result<usize>;
}

/// A fixed, eventually periodic walk: `prefix` then `cycle` forever.
/// An empty cycle makes the stream finite.
#[derive(Debug, Clone)]
pub struct CyclicWalk {
    prefix: Vec<usize>,
    cycle: Vec<usize>,
    pos: usize,
}

impl CyclicWalk {
    pub fn new(prefix: Vec<usize>, cycle: Vec<usize>) -> Self {
        Self {
            prefix,
            cycle,
            pos: 0,
        }
    }

    pub fn finite(walk: Vec<usize>) -> Self {
        Self::new(walk, Vec::new())
    }

    fn at(&self, i: usize) -> Option<usize> {
        if i < self.prefix.len() {
            Some(self.prefix[i])
        } else if self.cycle.is_empty() {
            None
        } else {
            Some(self.cycle[(i - self.prefix.len()) % self.cycle.len()])
        }
    }
}

impl Iterator for CyclicWalk {
    type Item = Result<usize>;

    fn next(&mut self) -> Option<Self::Item> {
        let e = self.at(self.pos)?;
        self.pos += 1;
        Some(Ok(e))
    }
}

impl BobStream for CyclicWalk {
    fn lookahead(&self, t: usize) -> usize {
        t
    }

    fn next_edge(&mut self, _alice: &[usize]) -> Result<usize> {
        self.next()
            .unwrap_or_else(|| Err(Error::InvalidWalk("Bob's walk ended early".into())))
    }
}

fn fill(
    graph: &DirectedGraph,
    from: usize,
    to: usize,
    len: usize,
    last: Option<usize>,
) -> Result<Vec<usize>> {
    fixed_length_walk(graph, from, to, len, last).ok_or_else(|| {
        Error::Internal(format!(
            "no connecting walk of length {len} from {:?} to {:?} in {}",
            graph.vertex_name(from),
            graph.vertex_name(to),
            graph.name()
        ))
    })
}

struct EquilibriumSetup {
    schedule: BlockSchedule,
    v0: usize,
    u0: usize,
    e0: Option<usize>,
    f0: Option<usize>,
}

fn setup(instance: &GameInstance, start: &StartSpec) -> Result<EquilibriumSetup> {
    if !is_irreducible(&instance.graph_g) || !is_irreducible(&instance.graph_h) {
        return Err(Error::Hypothesis(
            "equilibrium strategies require irreducible graphs".into(),
        ));
    }
    let st = instance.resolve_start(start)?;
    let comp = product_component_at(&instance.graph_g, &instance.graph_h, st.v0, st.u0)?;
    Ok(EquilibriumSetup {
        schedule: block_schedule(&comp),
        v0: st.v0,
        u0: st.u0,
        e0: st.edges.map(|e| e.0),
        f0: st.edges.map(|e| e.1),
    })
}

/// Alice's block strategy: block `k` is an optimal `p k`-round walk from
/// `t(e0)`, and every fill returns to `t(e0)`, ending with `e0` when a walk
/// of that shape exists.
pub struct AliceEquilibrium<'a> {
    instance: &'a GameInstance,
    schedule: BlockSchedule,
    v0: usize,
    u0: usize,
    e0: Option<usize>,
    witnesses: Vec<Vec<usize>>,
    buffer: VecDeque<usize>,
    at: usize,
    k: usize,
    in_block: bool,
    opts: SearchOptions,
    failed: bool,
}

impl<'a> AliceEquilibrium<'a> {
    pub fn schedule(&self) -> BlockSchedule {
        self.schedule
    }

    fn witness(&mut self, len: usize) -> Result<Vec<usize>> {
        if len >= self.witnesses.len() {
            let horizon = len.max(2 * self.witnesses.len());
            let (g, h) = (&self.instance.graph_g, &self.instance.graph_h);
            let (v0, u0, opts) = (self.v0, self.u0, self.opts);
            self.witnesses = with_scores!(self.instance, s => {
                nonalt_profile(&s, g, h, v0, &[u0], horizon, opts)?.witnesses
            });
        }
        Ok(self.witnesses[len].clone())
    }

    fn refill(&mut self) -> Result<()> {
        if self.in_block {
            let f = fill(
                &self.instance.graph_g,
                self.at,
                self.v0,
                self.schedule.fill_len(),
                self.e0,
            )?;
            self.buffer.extend(f);
            self.in_block = false;
        } else {
            self.k += 1;
            let w = self.witness(self.schedule.p * self.k)?;
            self.buffer.extend(w);
            self.in_block = true;
        }
        Ok(())
    }
}

impl Iterator for AliceEquilibrium<'_> {
    type Item = Result<usize>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        while self.buffer.is_empty() {
            if let Err(e) = self.refill() {
                self.failed = true;
                return Some(Err(e));
            }
        }
        let e = self.buffer.pop_front().unwrap();
        self.at = self.instance.graph_g.dst(e);
        Some(Ok(e))
    }
}

pub fn alice_equilibrium_stream<'a>(
    instance: &'a GameInstance,
    start: &StartSpec,
) -> Result<AliceEquilibrium<'a>> {
    let st = setup(instance, start)?;
    Ok(AliceEquilibrium {
        instance,
        schedule: st.schedule,
        v0: st.v0,
        u0: st.u0,
        e0: st.e0,
        witnesses: Vec::new(),
        buffer: VecDeque::new(),
        at: st.v0,
        k: 0,
        in_block: false,
        opts: SearchOptions::default(),
        failed: false,
    })
}

/// Bob's block strategy: a best response to each of Alice's blocks from
/// `t(f0)`, and fills back to `t(f0)` in between.
pub struct BobEquilibrium<'a> {
    instance: &'a GameInstance,
    schedule: BlockSchedule,
    u0: usize,
    f0: Option<usize>,
    buffer: VecDeque<usize>,
    at: usize,
    t: usize,
}

impl BobEquilibrium<'_> {
    pub fn schedule(&self) -> BlockSchedule {
        self.schedule
    }
}

impl BobStream for BobEquilibrium<'_> {
    fn lookahead(&self, t: usize) -> usize {
        match self.schedule.locate(t) {
            Phase::Block { k, .. } => self.schedule.b(k),
            Phase::Fill { .. } => t,
        }
    }

    fn next_edge(&mut self, alice: &[usize]) -> Result<usize> {
        self.t += 1;
        if self.buffer.is_empty() {
            let h = &self.instance.graph_h;
            match self.schedule.locate(self.t) {
                Phase::Block { k, offset: 0 } => {
                    let (a, b) = (self.schedule.a(k), self.schedule.b(k));
                    let segment = alice.get(a..b).ok_or_else(|| {
                        Error::Internal(format!("Alice prefix too short for block {k}"))
                    })?;
                    let at = self.at;
                    let walk = with_scores!(self.instance, s => best_response(&s, h, segment, &[at]).1);
                    self.buffer.extend(walk);
                }
                Phase::Fill { offset: 0, .. } => {
                    let f = fill(h, self.at, self.u0, self.schedule.fill_len(), self.f0)?;
                    self.buffer.extend(f);
                }
                phase => {
                    return Err(Error::Internal(format!(
                        "Bob's stream desynchronized at step {} ({phase:?})",
                        self.t
                    )))
                }
            }
        }
        let f = self.buffer.pop_front().unwrap();
        self.at = self.instance.graph_h.dst(f);
        Ok(f)
    }
}

pub fn bob_equilibrium_response<'a>(
    instance: &'a GameInstance,
    start: &StartSpec,
) -> Result<BobEquilibrium<'a>> {
    let st = setup(instance, start)?;
    Ok(BobEquilibrium {
        instance,
        schedule: st.schedule,
        u0: st.u0,
        f0: st.f0,
        buffer: VecDeque::new(),
        at: st.u0,
        t: 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub step: usize,
    pub alice_edge: usize,
    pub bob_edge: usize,
    pub cumulative: Value,
    pub average: Value,
}

/// Lazy replay of two streams; yields one record per step.
pub struct Simulation<'a, A, B> {
    instance: &'a GameInstance,
    alice: A,
    bob: B,
    alice_walk: Vec<usize>,
    last_bob: Option<usize>,
    t: usize,
    steps: usize,
    cumulative: Value,
    done: bool,
}

fn chain_error(graph: &DirectedGraph, t: usize, prev: usize, e: usize) -> Error {
    Error::InvalidWalk(format!(
        "step {t}: {:?} does not chain into {:?} in {}",
        graph.edge(prev).id,
        graph.edge(e).id,
        graph.name()
    ))
}

impl<A, B> Simulation<'_, A, B>
where
    A: Iterator<Item = Result<usize>>,
    B: BobStream,
{
    fn pull_alice(&mut self, need: usize) -> Option<Result<()>> {
        let g = &self.instance.graph_g;
        while self.alice_walk.len() < need {
            let e = match self.alice.next()? {
                Ok(e) => e,
                Err(err) => return Some(Err(err)),
            };
            if e >= g.edge_count() {
                return Some(Err(Error::InvalidWalk(format!("Alice edge index {e} out of range"))));
            }
            if let Some(&prev) = self.alice_walk.last() {
                if g.dst(prev) != g.src(e) {
                    return Some(Err(chain_error(g, self.alice_walk.len() + 1, prev, e)));
                }
            }
            self.alice_walk.push(e);
        }
        Some(Ok(()))
    }

    fn step(&mut self) -> Option<Result<TraceRecord>> {
        let t = self.t + 1;
        let need = self.bob.lookahead(t).max(t);
        match self.pull_alice(need)? {
            Ok(()) => {}
            Err(e) => return Some(Err(e)),
        }
        let f = match self.bob.next_edge(&self.alice_walk) {
            Ok(f) => f,
            Err(e) => return Some(Err(e)),
        };
        let h = &self.instance.graph_h;
        if f >= h.edge_count() {
            return Some(Err(Error::InvalidWalk(format!("Bob edge index {f} out of range"))));
        }
        if let Some(prev) = self.last_bob {
            if h.dst(prev) != h.src(f) {
                return Some(Err(chain_error(h, t, prev, f)));
            }
        }
        self.last_bob = Some(f);
        self.t = t;
        let e = self.alice_walk[t - 1];
        self.cumulative = self.cumulative.plus(&self.instance.score(e, f));
        Some(Ok(TraceRecord {
            step: t,
            alice_edge: e,
            bob_edge: f,
            cumulative: self.cumulative,
            average: self.cumulative.div_int(t as i64),
        }))
    }
}

impl<A, B> Iterator for Simulation<'_, A, B>
where
    A: Iterator<Item = Result<usize>>,
    B: BobStream,
{
    type Item = Result<TraceRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done || self.t >= self.steps {
            return None;
        }
        let item = self.step();
        if !matches!(item, Some(Ok(_))) {
            self.done = true;
        }
        item
    }
}

pub fn simulate<A, B>(instance: &GameInstance, alice: A, bob: B, steps: usize) -> Simulation<'_, A, B>
where
    A: Iterator<Item = Result<usize>>,
    B: BobStream,
{
    let zero = match instance.numeric_mode() {
        crate::value::NumericMode::ExactRational => Value::integer(0),
        crate::value::NumericMode::Float64 => Value::Float(0.0),
    };
    Simulation {
        instance,
        alice,
        bob,
        alice_walk: Vec::new(),
        last_bob: None,
        t: 0,
        steps,
        cumulative: zero,
        done: false,
    }
}

/// Running average after the final step of a simulation.
pub fn final_average<A, B>(instance: &GameInstance, alice: A, bob: B, steps: usize) -> Result<Value>
where
    A: Iterator<Item = Result<usize>>,
    B: BobStream,
{
    let mut last = None;
    for rec in simulate(instance, alice, bob, steps) {
        last = Some(rec?);
    }
    match last {
        Some(r) if r.step == steps => Ok(r.average),
        Some(r) => Err(Error::InvalidWalk(format!("stream ended after {} steps", r.step))),
        None => Err(Error::InvalidWalk("stream produced no steps".into())),
    }
}
