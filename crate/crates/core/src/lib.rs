//! Sampling edges of a graph almost uniformly with sublinear query access.
//!
//! The sampler sees the graph only through a [`QueryOracle`], which answers
//! uniform-vertex, degree and neighbor queries and counts every one. A
//! one-off [`preprocess`] step spends queries to build a [`SamplerState`];
//! after that each [`sample_edge`] call is cheap, and the trade-off `x`
//! moves cost between the two.
//!
//! ```
//! use subedge::{preprocess, sample_edge, GenSpec, QueryOracle, SamplerConfig};
//! use subedge::rng::{stream_rng, Stream};
//!
//! let graph = GenSpec::Lollipop { k: 10, path_len: 40 }.generate(0).unwrap();
//! let mut oracle = QueryOracle::new(&graph, 42);
//! let state = preprocess(&mut oracle, &SamplerConfig::new(0.25, 0.1, 2.0, 42)).unwrap();
//! let mut rng = stream_rng(42, Stream::Sampling);
//! let drawn = sample_edge(&mut oracle, &state, &mut rng).unwrap();
//! assert!(graph.neighbors(drawn.edge.source).contains(&drawn.edge.target));
//! ```

pub mod alias;
pub mod error;
pub mod estimator;
pub mod gen;
pub mod graph;
pub mod harness;
pub mod oracle;
pub mod rng;
pub mod sampler;

pub use error::{AliasError, EstimatorError, GraphError, HarnessError, OutOfRange, SamplerError};
pub use estimator::{estimate_avg_degree, DegreeEstimate, EstimatorMode};
pub use gen::GenSpec;
pub use graph::{Graph, OrientedEdge, VertexId};
pub use oracle::{QueryCounts, QueryOracle};
pub use sampler::{exact_distribution, preprocess, sample_edge, SamplerConfig, SamplerState};

// The guide's code blocks run as doctests through these items.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/query-model.md")]
    mod query_model {}
    #[doc = include_str!("../../../book/src/preprocessing.md")]
    mod preprocessing {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/alias.md")]
    mod alias {}
    #[doc = include_str!("../../../book/src/estimator.md")]
    mod estimator {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
