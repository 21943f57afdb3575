use thiserror::Error;

use crate::treecount::Node;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("node count must be positive")]
    EmptyGraph,
    #[error("node {node} out of range for n = {n}")]
    NodeOutOfRange { node: Node, n: usize },
    #[error("node {0} has more than one parent")]
    MultipleParents(Node),
    #[error("self-loop on node {0} is not allowed in a forest")]
    SelfLoop(Node),
    #[error("parent assignment contains a cycle through node {0}")]
    Cycle(Node),
    #[error("expected exactly one root, found {0}")]
    RootCount(usize),
    #[error("node {0} is not the root of its component")]
    NotComponentRoot(Node),
    #[error("enumeration limited to n <= {cap}, got {n}")]
    EnumerationCap { n: usize, cap: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid edge pool: {0}")]
    InvalidPool(String),
    #[error("adversary violated its contract: {0}")]
    Strategy(String),
    #[error("tree is already non-increasing")]
    AlreadyNonIncreasing,
    #[error("merge requires two disjoint non-trivial trees")]
    InvalidMerge,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error on {path}: {msg}")]
    Io { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
