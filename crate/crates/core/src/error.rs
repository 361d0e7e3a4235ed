use std::path::PathBuf;

use thiserror::Error;

use crate::graph::{EdgeId, NodeId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate edge between `{0}` and `{1}`")]
    DuplicateEdge(String, String),
    #[error("self-loop on node `{0}`")]
    SelfLoop(String),
    #[error("negative {what} {value} on edge `{u}`-`{v}`")]
    NegativeValue {
        what: &'static str,
        value: f64,
        u: String,
        v: String,
    },
    #[error("node id {0} out of range")]
    UnknownNode(NodeId),
    #[error("edge id {0} out of range")]
    UnknownEdge(EdgeId),
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("a constraint path has every edge protected, so it cannot be cut")]
    InfeasibleCover,
    #[error("numerical instability in the LP solver: {0}")]
    NumericalInstability(String),
    #[error("randomized rounding did not produce an accepted cut after {0} trials")]
    ResourceExhausted(usize),
    #[error("constraint generation exceeded {0} iterations")]
    IterationCap(usize),
    #[error("instance is infeasible: {0}")]
    InfeasibleInstance(String),
    #[error("a competing path has no removable edge")]
    Stuck,
    #[error("power iteration did not converge in {0} iterations")]
    NonConvergence(usize),
    #[error("{candidates} candidate elements exceed the enumeration limit of {limit}")]
    TooLarge { candidates: usize, limit: usize },
    #[error("no node at the requested hop distance {0}")]
    NoCandidate(usize),
    #[error("path enumeration exhausted before the requested element was found")]
    Exhausted,
    #[error("time limit reached")]
    TimedOut,
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
