//! Game instances `(G, H, P, start)` and the JSON instance document.

use std::collections::HashMap;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, EdgeSpec};
use crate::value::{common_scale, parse_float, parse_rational, NumericMode, Value, Weight};

/// A score written either as an exact rational or (float mode) a float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Score {
    Exact(Rational64),
    Float(f64),
}

impl Score {
    pub fn integer(v: i64) -> Self {
        Score::Exact(Rational64::from_integer(v))
    }

    fn render(&self) -> String {
        match self {
            Score::Exact(r) => r.to_string(),
            Score::Float(x) => format!("{x:?}"),
        }
    }
}

/// Sparse score specification: explicit entries plus a default.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSpec {
    pub default: Score,
    pub entries: Vec<(String, String, Score)>,
}

impl ScoreSpec {
    pub fn with_default(default: Score) -> Self {
        Self {
            default,
            entries: Vec::new(),
        }
    }

    pub fn set(&mut self, g: &str, h: &str, value: Score) {
        self.entries.push((g.to_string(), h.to_string(), value));
    }
}

#[derive(Debug, Clone)]
enum ScoreTable {
    Exact {
        scaled: Vec<i64>,
        default: i64,
        scale: i64,
    },
    Float {
        values: Vec<f64>,
        default: f64,
    },
}

/// Borrowed dense score table in one concrete weight type.
#[derive(Debug, Clone, Copy)]
pub struct ScoreView<'a, W> {
    table: &'a [W],
    n_h: usize,
    scale: i64,
    norm: W,
}

impl<'a, W: Weight> ScoreView<'a, W> {
    #[inline]
    pub fn get(&self, e: usize, f: usize) -> W {
        self.table[e * self.n_h + f]
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// `max |P(e, f)|`, including the default.
    pub fn norm(&self) -> W {
        self.norm
    }

    pub fn value(&self, w: W) -> Value {
        W::ratio(w, 1, self.scale)
    }

    /// `w / den`, reported in this table's units.
    pub fn ratio(&self, w: W, den: i64) -> Value {
        W::ratio(w, den, self.scale)
    }

    /// The unique score if the table is constant.
    pub fn constant(&self) -> Option<W> {
        let first = *self.table.first()?;
        self.table.iter().all(|&w| w == first).then_some(first)
    }
}

/// Dense score table borrowed in whichever mode the instance uses.
pub enum Scores<'a> {
    Exact(ScoreView<'a, i64>),
    Float(ScoreView<'a, f64>),
}

/// Runs `$body` with `$s` bound to the instance's typed [`ScoreView`].
#[macro_export]
macro_rules! with_scores {
    ($inst:expr, $s:ident => $body:expr) => {
        match $inst.scores() {
            $crate::instance::Scores::Exact($s) => $body,
            $crate::instance::Scores::Float($s) => $body,
        }
    };
}

/// Start of a game: initial edges (resolved to their terminal vertices) or
/// initial vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum StartSpec {
    Edges { g_edge: String, h_edge: String },
    Vertices { g_vertex: String, h_vertex: String },
}

impl StartSpec {
    pub fn edges(g: &str, h: &str) -> Self {
        StartSpec::Edges {
            g_edge: g.to_string(),
            h_edge: h.to_string(),
        }
    }

    pub fn vertices(g: &str, h: &str) -> Self {
        StartSpec::Vertices {
            g_vertex: g.to_string(),
            h_vertex: h.to_string(),
        }
    }
}

/// A start resolved against an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolvedStart {
    pub v0: usize,
    pub u0: usize,
    /// Initial edges when the start was given in edge form.
    pub edges: Option<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct GameInstance {
    pub graph_g: DirectedGraph,
    pub graph_h: DirectedGraph,
    spec: ScoreSpec,
    table: ScoreTable,
    pub start: Option<StartSpec>,
}

impl GameInstance {
    pub fn new(graph_g: DirectedGraph, graph_h: DirectedGraph, spec: ScoreSpec) -> Result<Self> {
        let mode = match spec.default {
            Score::Exact(_) => NumericMode::ExactRational,
            Score::Float(_) => NumericMode::Float64,
        };
        let (n_g, n_h) = (graph_g.edge_count(), graph_h.edge_count());
        let mut slots: Vec<Option<Score>> = vec![None; n_g * n_h];
        for (g, h, value) in &spec.entries {
            let e = graph_g.edge_by_id(g)?;
            let f = graph_h.edge_by_id(h)?;
            let same_mode = matches!(
                (mode, value),
                (NumericMode::ExactRational, Score::Exact(_)) | (NumericMode::Float64, Score::Float(_))
            );
            if !same_mode {
                return Err(Error::Document(format!(
                    "score entry ({g}, {h}) does not match the instance numeric mode"
                )));
            }
            if slots[e * n_h + f].replace(*value).is_some() {
                return Err(Error::DuplicateId {
                    context: "score entries".into(),
                    id: format!("({g}, {h})"),
                });
            }
        }

        let table = match spec.default {
            Score::Exact(default) => {
                let mut all: Vec<Rational64> = slots
                    .iter()
                    .map(|s| match s {
                        Some(Score::Exact(r)) => *r,
                        _ => default,
                    })
                    .collect();
                all.push(default);
                let (mut scaled, scale) = common_scale(&all)?;
                let default = scaled.pop().unwrap_or(0);
                // keep the sum of a long walk comfortably inside i64
                if scaled.iter().chain([&default]).any(|v| v.unsigned_abs() > 1 << 40) {
                    return Err(Error::MalformedNumber("score magnitude too large".into()));
                }
                ScoreTable::Exact {
                    scaled,
                    default,
                    scale,
                }
            }
            Score::Float(default) => ScoreTable::Float {
                values: slots
                    .iter()
                    .map(|s| match s {
                        Some(Score::Float(x)) => *x,
                        _ => default,
                    })
                    .collect(),
                default,
            },
        };

        Ok(Self {
            graph_g,
            graph_h,
            spec,
            table,
            start: None,
        })
    }

    pub fn with_start(mut self, start: StartSpec) -> Result<Self> {
        self.resolve_start(&start)?;
        self.start = Some(start);
        Ok(self)
    }

    pub fn numeric_mode(&self) -> NumericMode {
        match self.table {
            ScoreTable::Exact { .. } => NumericMode::ExactRational,
            ScoreTable::Float { .. } => NumericMode::Float64,
        }
    }

    pub fn score_spec(&self) -> &ScoreSpec {
        &self.spec
    }

    pub fn scores(&self) -> Scores<'_> {
        let n_h = self.graph_h.edge_count();
        match &self.table {
            ScoreTable::Exact {
                scaled,
                default,
                scale,
            } => Scores::Exact(ScoreView {
                table: scaled,
                n_h,
                scale: *scale,
                norm: scaled.iter().map(|v| v.abs()).fold(default.abs(), i64::max),
            }),
            ScoreTable::Float { values, default } => Scores::Float(ScoreView {
                table: values,
                n_h,
                scale: 1,
                norm: values.iter().map(|v| v.abs()).fold(default.abs(), f64::max),
            }),
        }
    }

    /// `P(e, f)` as a reported value.
    pub fn score(&self, e: usize, f: usize) -> Value {
        with_scores!(self, s => s.value(s.get(e, f)))
    }

    pub fn score_norm(&self) -> Value {
        with_scores!(self, s => s.value(s.norm()))
    }

    pub fn resolve_start(&self, start: &StartSpec) -> Result<ResolvedStart> {
        match start {
            StartSpec::Edges { g_edge, h_edge } => {
                let e0 = self.graph_g.edge_by_id(g_edge)?;
                let f0 = self.graph_h.edge_by_id(h_edge)?;
                Ok(ResolvedStart {
                    v0: self.graph_g.dst(e0),
                    u0: self.graph_h.dst(f0),
                    edges: Some((e0, f0)),
                })
            }
            StartSpec::Vertices { g_vertex, h_vertex } => Ok(ResolvedStart {
                v0: self.graph_g.vertex(g_vertex)?,
                u0: self.graph_h.vertex(h_vertex)?,
                edges: None,
            }),
        }
    }

    /// Resolves `start`, falling back to the document's own start.
    pub fn start_or_default(&self, start: Option<&StartSpec>) -> Result<ResolvedStart> {
        match start.or(self.start.as_ref()) {
            Some(s) => self.resolve_start(s),
            None => Err(Error::MissingStart(
                "no start given and the instance declares none".into(),
            )),
        }
    }

    /// Replays a pair of walks through the score table.
    pub fn replay(&self, alice: &[usize], bob: &[usize]) -> Value {
        with_scores!(self, s => {
            let total = alice
                .iter()
                .zip(bob)
                .fold(Weight::ZERO, |acc, (&e, &f)| acc + s.get(e, f));
            s.value(total)
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDoc =
            serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        doc.into_instance()
    }

    pub fn to_document(&self) -> InstanceDoc {
        let float = self.numeric_mode() == NumericMode::Float64;
        InstanceDoc {
            graph_g: GraphDoc::from_graph(&self.graph_g),
            graph_h: GraphDoc::from_graph(&self.graph_h),
            score: ScoreDoc {
                default: NumberDoc::Text(self.spec.default.render()),
                entries: self
                    .spec
                    .entries
                    .iter()
                    .map(|(g, h, v)| EntryDoc {
                        g: g.clone(),
                        h: h.clone(),
                        value: NumberDoc::Text(v.render()),
                    })
                    .collect(),
            },
            start: self.start.as_ref().map(StartDoc::from_spec),
            numeric_mode: float.then(|| "float64".to_string()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("instance serializes")
    }
}

// ---------------------------------------------------------------------------
// Document schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub graph_g: GraphDoc,
    pub graph_h: GraphDoc,
    pub score: ScoreDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<StartDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numeric_mode: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: String,
    pub src: String,
    pub dst: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<u8>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoreDoc {
    pub default: NumberDoc,
    #[serde(default)]
    pub entries: Vec<EntryDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntryDoc {
    pub g: String,
    pub h: String,
    pub value: NumberDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberDoc {
    Text(String),
    Number(serde_json::Number),
}

impl NumberDoc {
    fn parse(&self, float: bool) -> Result<Score> {
        let text = match self {
            NumberDoc::Text(s) => s.clone(),
            NumberDoc::Number(n) => n.to_string(),
        };
        if float {
            parse_float(&text).map(Score::Float)
        } else {
            parse_rational(&text).map(Score::Exact)
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct StartDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_edge: Option<String>,
    #[serde(default, alias = "h_edge", skip_serializing_if = "Option::is_none")]
    pub f_edge: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_vertex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_vertex: Option<String>,
}

impl StartDoc {
    fn from_spec(spec: &StartSpec) -> Self {
        match spec {
            StartSpec::Edges { g_edge, h_edge } => StartDoc {
                g_edge: Some(g_edge.clone()),
                f_edge: Some(h_edge.clone()),
                ..Default::default()
            },
            StartSpec::Vertices { g_vertex, h_vertex } => StartDoc {
                g_vertex: Some(g_vertex.clone()),
                h_vertex: Some(h_vertex.clone()),
                ..Default::default()
            },
        }
    }

    fn to_spec(&self) -> Result<StartSpec> {
        match (&self.g_edge, &self.f_edge, &self.g_vertex, &self.h_vertex) {
            (Some(g), Some(h), None, None) => Ok(StartSpec::edges(g, h)),
            (None, None, Some(g), Some(h)) => Ok(StartSpec::vertices(g, h)),
            _ => Err(Error::Document(
                "start must be {g_edge, f_edge} or {g_vertex, h_vertex}".into(),
            )),
        }
    }
}

impl GraphDoc {
    fn from_graph(g: &DirectedGraph) -> Self {
        GraphDoc {
            vertices: g.vertices().to_vec(),
            edges: g
                .to_specs()
                .into_iter()
                .map(|e| EdgeDoc {
                    id: e.id,
                    src: e.src,
                    dst: e.dst,
                    label: e.label,
                })
                .collect(),
        }
    }

    fn into_graph(self, name: &str) -> Result<DirectedGraph> {
        let edges = self
            .edges
            .into_iter()
            .map(|e| EdgeSpec {
                id: e.id,
                src: e.src,
                dst: e.dst,
                label: e.label,
            })
            .collect();
        DirectedGraph::from_specs(name, self.vertices, edges)
    }
}

impl InstanceDoc {
    pub fn into_instance(self) -> Result<GameInstance> {
        let float = match self.numeric_mode.as_deref() {
            None | Some("exact-rational") | Some("exact") => false,
            Some("float64") => true,
            Some(other) => {
                return Err(Error::Document(format!("unknown numeric_mode {other:?}")))
            }
        };
        let graph_g = self.graph_g.into_graph("graph_g")?;
        let graph_h = self.graph_h.into_graph("graph_h")?;
        let mut spec = ScoreSpec::with_default(self.score.default.parse(float)?);
        let mut seen = HashMap::new();
        for entry in self.score.entries {
            let value = entry.value.parse(float)?;
            if seen.insert((entry.g.clone(), entry.h.clone()), ()).is_some() {
                return Err(Error::DuplicateId {
                    context: "score entries".into(),
                    id: format!("({}, {})", entry.g, entry.h),
                });
            }
            spec.set(&entry.g, &entry.h, value);
        }
        let instance = GameInstance::new(graph_g, graph_h, spec)?;
        match self.start {
            Some(start) => instance.with_start(start.to_spec()?),
            None => Ok(instance),
        }
    }
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<GameInstance> {
    GameInstance::from_json(text)
}
