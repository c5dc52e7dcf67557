use std::path::PathBuf;

use thiserror::Error;

use crate::graph::VertexId;

/// Problems reading or validating an edge-list file.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: VertexId },
    #[error("line {line}: duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { line: usize, u: VertexId, v: VertexId },
    #[error("line {line}: vertex id {vertex} is not below the declared n={n}")]
    VertexOutOfRange { line: usize, vertex: VertexId, n: usize },
    #[error("graph has {0} vertices, more than the supported maximum")]
    TooLarge(usize),
    #[error("degenerate generator spec: {0}")]
    Degenerate(String),
    #[error("cannot parse generator spec {spec:?}: {message}")]
    BadSpec { spec: String, message: String },
}

/// Query issued against the oracle for a vertex outside `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("vertex {vertex} out of range for a graph on {n} vertices")]
pub struct OutOfRange {
    pub vertex: VertexId,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AliasError {
    #[error("alias table needs at least one weight")]
    Empty,
    #[error("weight {index} is negative or not finite: {weight}")]
    InvalidWeight { index: usize, weight: f64 },
    #[error("all weights are zero")]
    AllZero,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("graph has no edges")]
    NoEdges,
    #[error("average-degree estimator gave up after {queries} queries (budget {budget})")]
    BudgetExceeded { queries: u64, budget: u64 },
    #[error("invalid estimator parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplerError {
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),
    #[error("graph has no edges")]
    NoEdges,
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error("no S_i accepted: all {sets} sampled multisets had m(S)/s outside [d/4, 12d]")]
    NoSetAccepted { sets: u32 },
    #[error("sample_edge gave up after {iterations} iterations; the sampler state is likely bad")]
    IterationCap { iterations: u64 },
    #[error("sampler state is inconsistent: {0}")]
    InvalidState(String),
    #[error("state does not match graph: {0}")]
    GraphMismatch(String),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("reference distribution has zero mass on edge {0}")]
    ZeroReferenceMass(usize),
    #[error("distributions are over different edge universes ({0} vs {1} edges)")]
    UniverseMismatch(usize, usize),
    #[error("an empirical distribution needs at least one sample")]
    NoSamples,
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("report output failed: {0}")]
    Output(String),
}
