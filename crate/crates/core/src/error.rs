use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("directed cycle through node `{0}`")]
    Cycle(String),
    #[error("duplicate edge `{0}`")]
    DuplicateEdge(String),
    #[error("self-loop on node `{0}`")]
    SelfLoop(String),
    #[error("node `{node}` used at line {line} without a `node` declaration (strict mode)")]
    Undeclared { node: String, line: usize },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node name `{0}` is already taken")]
    NameCollision(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("not a directed edge of the graph: {0} -> {1}")]
    NotAnEdge(String, String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid route: {0}")]
    InvalidRoute(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("state space of {cells} cells exceeds the limit of {limit}")]
    StateSpace { cells: u128, limit: u128 },
    #[error("value {value} out of domain for `{node}` (size {size})")]
    OutOfDomain {
        node: String,
        value: usize,
        size: usize,
    },
    #[error("positivity violated: P({cell}) = 0 while the covariate cell has positive mass")]
    Positivity { cell: String },
    #[error("the adjustment criterion holds for this query; no counterexample exists")]
    CriterionHolds,
    #[error("the adjustment criterion fails for this query; soundness does not apply")]
    CriterionFails,
    #[error("malformed model: {0}")]
    MalformedModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;
