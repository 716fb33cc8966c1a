use thiserror::Error;

/// Errors raised by graph construction and the median-graph algorithms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid vertex id {id} (graph has {n} vertices)")]
    InvalidVertex { id: usize, n: usize },

    #[error("invalid class id {id} (partition has {q} classes)")]
    InvalidClass { id: usize, q: usize },

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),

    #[error("graph is not connected")]
    Disconnected,

    #[error("graph is not bipartite (odd cycle through edge {0}-{1})")]
    NotBipartite(usize, usize),

    #[error("empty seed set")]
    EmptySeedSet,

    #[error("not a median graph: {0}")]
    NotMedian(String),

    #[error("vertex weight {weight} at vertex {vertex} exceeds the cap 2^40")]
    WeightTooLarge { vertex: usize, weight: u64 },

    #[error("weight vector has length {got}, expected {expected}")]
    WeightLength { got: usize, expected: usize },

    #[error("size guard exceeded: {0}")]
    Guard(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("corrupted label table: {0}")]
    CorruptedTable(String),

    #[error("foreign vertex: {0}")]
    ForeignVertex(String),

    #[error("invalid generator spec: {0}")]
    BadSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
