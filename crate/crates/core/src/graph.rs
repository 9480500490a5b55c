//! Directed multigraphs with explicit edge ids, and walks on them.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub id: String,
    pub src: usize,
    pub dst: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<u8>,
}

/// Raw edge record as it appears in an instance document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSpec {
    pub id: String,
    pub src: String,
    pub dst: String,
    pub label: Option<u8>,
}

impl EdgeSpec {
    pub fn new(id: impl Into<String>, src: impl Into<String>, dst: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            src: src.into(),
            dst: dst.into(),
            label: None,
        }
    }

    pub fn labeled(mut self, bit: u8) -> Self {
        self.label = Some(bit);
        self
    }
}

/// A validated, sink-free directed multigraph.
///
/// Vertices and edges are addressed by dense indices internally; the string
/// ids are kept for I/O. Out-edge lists are sorted by edge id so that every
/// "first edge" choice in the solvers is the lexicographically smallest one.
#[derive(Debug, Clone)]
pub struct DirectedGraph {
    name: String,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl DirectedGraph {
    pub fn new(name: &str, vertices: &[&str], edges: Vec<EdgeSpec>) -> Result<Self> {
        let vertices: Vec<String> = vertices.iter().map(|v| v.to_string()).collect();
        Self::from_specs(name, vertices, edges)
    }

    /// Builds and validates a graph: unique ids, no dangling endpoints, no sinks.
    pub fn from_specs(name: &str, vertices: Vec<String>, edges: Vec<EdgeSpec>) -> Result<Self> {
        let mut vertex_index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateId {
                    context: format!("vertices of {name}"),
                    id: v.clone(),
                });
            }
        }

        let mut edge_index = HashMap::with_capacity(edges.len());
        let mut resolved = Vec::with_capacity(edges.len());
        for spec in edges {
            let lookup = |v: &str| {
                vertex_index
                    .get(v)
                    .copied()
                    .ok_or_else(|| Error::DanglingReference {
                        context: format!("edge {:?} of {name}", spec.id),
                        reference: v.to_string(),
                    })
            };
            let src = lookup(&spec.src)?;
            let dst = lookup(&spec.dst)?;
            if let Some(bit) = spec.label {
                if bit > 1 {
                    return Err(Error::Document(format!(
                        "edge {:?} of {name}: label must be 0 or 1",
                        spec.id
                    )));
                }
            }
            if edge_index.insert(spec.id.clone(), resolved.len()).is_some() {
                return Err(Error::DuplicateId {
                    context: format!("edges of {name}"),
                    id: spec.id,
                });
            }
            resolved.push(Edge {
                id: spec.id,
                src,
                dst,
                label: spec.label,
            });
        }

        let mut out_edges = vec![Vec::new(); vertices.len()];
        let mut in_edges = vec![Vec::new(); vertices.len()];
        for (i, e) in resolved.iter().enumerate() {
            out_edges[e.src].push(i);
            in_edges[e.dst].push(i);
        }
        for list in out_edges.iter_mut().chain(in_edges.iter_mut()) {
            list.sort_by(|&a, &b| resolved[a].id.cmp(&resolved[b].id));
        }
        if let Some(v) = out_edges.iter().position(|l| l.is_empty()) {
            return Err(Error::SinkVertex {
                graph: name.to_string(),
                vertex: vertices[v].clone(),
            });
        }

        Ok(Self {
            name: name.to_string(),
            vertices,
            edges: resolved,
            vertex_index,
            edge_index,
            out_edges,
            in_edges,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex(&self, id: &str) -> Result<usize> {
        self.vertex_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::DanglingReference {
                context: format!("vertices of {}", self.name),
                reference: id.to_string(),
            })
    }

    pub fn edge_by_id(&self, id: &str) -> Result<usize> {
        self.edge_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::DanglingReference {
                context: format!("edges of {}", self.name),
                reference: id.to_string(),
            })
    }

    /// Out-edges of `v`, sorted by edge id.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    pub fn src(&self, e: usize) -> usize {
        self.edges[e].src
    }

    pub fn dst(&self, e: usize) -> usize {
        self.edges[e].dst
    }

    /// Vertex adjacency lists (parallel edges collapsed).
    pub fn successors(&self) -> Vec<Vec<usize>> {
        self.out_edges
            .iter()
            .map(|es| {
                let mut s: Vec<usize> = es.iter().map(|&e| self.edges[e].dst).collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect()
    }

    /// True when every vertex has exactly one outgoing edge.
    pub fn is_single_choice(&self) -> bool {
        self.out_edges.iter().all(|l| l.len() == 1)
    }

    /// Number of walks of length `n` from `v`, saturating.
    pub fn count_walks(&self, v: usize, n: usize) -> u128 {
        let mut counts = vec![1u128; self.vertex_count()];
        for _ in 0..n {
            counts = (0..self.vertex_count())
                .map(|u| {
                    self.out_edges[u]
                        .iter()
                        .fold(0u128, |acc, &e| acc.saturating_add(counts[self.edges[e].dst]))
                })
                .collect();
        }
        counts[v]
    }

    pub fn edge_ids(&self, walk: &[usize]) -> Vec<String> {
        walk.iter().map(|&e| self.edges[e].id.clone()).collect()
    }

    pub fn to_specs(&self) -> Vec<EdgeSpec> {
        self.edges
            .iter()
            .map(|e| EdgeSpec {
                id: e.id.clone(),
                src: self.vertices[e.src].clone(),
                dst: self.vertices[e.dst].clone(),
                label: e.label,
            })
            .collect()
    }
}

/// A finite walk, stored as edge indices into its graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Walk {
    pub edges: Vec<usize>,
}

impl Walk {
    pub fn new(edges: Vec<usize>) -> Self {
        Self { edges }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn from_ids(graph: &DirectedGraph, ids: &[&str]) -> Result<Self> {
        let edges = ids
            .iter()
            .map(|id| graph.edge_by_id(id))
            .collect::<Result<Vec<_>>>()?;
        let walk = Self { edges };
        walk.validate(graph, None)?;
        Ok(walk)
    }

    /// Checks the chaining invariant and, optionally, the start vertex.
    pub fn validate(&self, graph: &DirectedGraph, start: Option<usize>) -> Result<()> {
        validate_walk(graph, &self.edges, start)
    }

    pub fn ids(&self, graph: &DirectedGraph) -> Vec<String> {
        graph.edge_ids(&self.edges)
    }

    /// Bit labels along the walk; `None` if any edge is unlabeled.
    pub fn labels(&self, graph: &DirectedGraph) -> Option<Vec<u8>> {
        self.edges.iter().map(|&e| graph.edge(e).label).collect()
    }
}

/// Walk validator shared by every producer of walks.
pub fn validate_walk(graph: &DirectedGraph, edges: &[usize], start: Option<usize>) -> Result<()> {
    if let Some(&e) = edges.iter().find(|&&e| e >= graph.edge_count()) {
        return Err(Error::InvalidWalk(format!(
            "edge index {e} out of range in {}",
            graph.name()
        )));
    }
    if let (Some(v), Some(&first)) = (start, edges.first()) {
        if graph.src(first) != v {
            return Err(Error::InvalidWalk(format!(
                "walk in {} starts with {:?} but should leave {:?}",
                graph.name(),
                graph.edge(first).id,
                graph.vertex_name(v)
            )));
        }
    }
    for (k, pair) in edges.windows(2).enumerate() {
        if graph.dst(pair[0]) != graph.src(pair[1]) {
            return Err(Error::InvalidWalk(format!(
                "step {}: {:?} does not chain into {:?} in {}",
                k + 2,
                graph.edge(pair[0]).id,
                graph.edge(pair[1]).id,
                graph.name()
            )));
        }
    }
    Ok(())
}
