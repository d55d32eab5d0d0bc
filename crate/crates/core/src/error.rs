use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cycle detected through nodes {0:?}")]
    CycleDetected(Vec<usize>),

    #[error("malformed parent list for node {0}")]
    MalformedParents(usize),

    #[error("node count mismatch: {left} vs {right}")]
    NodeCountMismatch { left: usize, right: usize },

    #[error("invalid variable {name:?}: {reason}")]
    InvalidVariable { name: String, reason: String },

    #[error("conditional probability table of node {node} ({name}): {reason}")]
    InvalidCpt {
        node: usize,
        name: String,
        reason: String,
    },

    #[error("invalid node order: {0}")]
    InvalidOrder(String),

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("invalid parent set for node {node}: {reason}")]
    InvalidParentSet { node: usize, reason: String },

    #[error("invalid dataset: {0}")]
    InvalidData(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("invalid missingness model: {0}")]
    InvalidMissingness(String),

    #[error("invalid penalty: {0}")]
    InvalidPenalty(String),

    #[error("penalty evaluated at sample size 0")]
    ZeroSampleSize,

    #[error("joint state space has {states} states, cap is {cap}")]
    StateSpaceTooLarge { states: u128, cap: u128 },

    #[error("table does not match DAG at node {0}")]
    TableMismatch(usize),

    #[error("every candidate parent set of node {0} is unobservable")]
    AllCandidatesUnobservable(usize),

    #[error("node {0} has no complete observation of itself and its parents")]
    UnobservableNode(usize),

    #[error("parameters of node {node} are not normalized (parent config {config:?})")]
    NonNormalizedParameters { node: usize, config: Option<usize> },

    #[error("invalid experiment configuration: {0}")]
    Config(String),

    #[error("rate probe needs at least two distinct sample sizes")]
    InsufficientGrid,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
