use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed instance document: {0}")]
    Document(String),

    #[error("malformed number {0:?}")]
    MalformedNumber(String),

    #[error("sink vertex {vertex:?} in graph {graph}")]
    SinkVertex { graph: String, vertex: String },

    #[error("dangling reference {reference:?} in {context}")]
    DanglingReference { context: String, reference: String },

    #[error("duplicate id {id:?} in {context}")]
    DuplicateId { context: String, id: String },

    #[error("invalid walk: {0}")]
    InvalidWalk(String),

    #[error("period undefined: component has no cycle")]
    PeriodUndefined,

    #[error("transient start: pair ({g}, {h}) lies in a trivial product component")]
    TransientStart { g: String, h: String },

    #[error("missing start: {0}")]
    MissingStart(String),

    /// Violated solver hypothesis, carried verbatim into reports.
    #[error("{0}")]
    Hypothesis(String),

    #[error("empty constrained system")]
    EmptyConstrainedSystem,

    #[error("empty code: no allowed words of length {0}")]
    EmptyCode(usize),

    #[error("invalid forbidden pattern set: {0}")]
    InvalidPatterns(String),

    #[error("unknown gallery entry {0:?}")]
    UnknownExample(String),

    #[error("node cap {cap} exceeded at round {round}; best lower bound so far {best_lower_bound}")]
    NodeCapExceeded {
        cap: usize,
        round: usize,
        best_lower_bound: String,
    },

    #[error("enumeration guard exceeded: {count} > {limit}")]
    EnumerationGuard { count: u128, limit: u128 },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Resource guards are reported separately from domain errors by the CLI.
    pub fn is_resource_guard(&self) -> bool {
        matches!(
            self,
            Error::NodeCapExceeded { .. } | Error::EnumerationGuard { .. }
        )
    }
}
