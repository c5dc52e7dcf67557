//! Metered access to a graph in the adjacency-list query model.
//!
//! Algorithms see the graph only through [`QueryOracle`]: uniform vertex
//! queries, degree queries and indexed neighbor queries. Each call bumps an
//! exact counter.

use std::ops::{Add, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::OutOfRange;
use crate::graph::{Graph, VertexId};
use crate::rng::{stream_rng, SimRng, Stream};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCounts {
    pub uniform_vertex: u64,
    pub degree: u64,
    pub neighbor: u64,
}

impl QueryCounts {
    pub fn total(&self) -> u64 {
        self.uniform_vertex + self.degree + self.neighbor
    }
}

impl Add for QueryCounts {
    type Output = QueryCounts;

    fn add(self, rhs: QueryCounts) -> QueryCounts {
        QueryCounts {
            uniform_vertex: self.uniform_vertex + rhs.uniform_vertex,
            degree: self.degree + rhs.degree,
            neighbor: self.neighbor + rhs.neighbor,
        }
    }
}

impl Sub for QueryCounts {
    type Output = QueryCounts;

    /// Counter delta. Counters never decrease, so `later - earlier` is safe.
    fn sub(self, rhs: QueryCounts) -> QueryCounts {
        QueryCounts {
            uniform_vertex: self.uniform_vertex - rhs.uniform_vertex,
            degree: self.degree - rhs.degree,
            neighbor: self.neighbor - rhs.neighbor,
        }
    }
}

/// Single-owner query interface over a shared graph.
#[derive(Debug)]
pub struct QueryOracle<'g> {
    graph: &'g Graph,
    rng: SimRng,
    counts: QueryCounts,
}

impl<'g> QueryOracle<'g> {
    /// Oracle whose uniform vertex draws come from the oracle stream of `seed`.
    pub fn new(graph: &'g Graph, seed: u64) -> Self {
        QueryOracle::with_rng(graph, stream_rng(seed, Stream::Oracle))
    }

    /// Oracle for sampling from a state that was built and saved by an
    /// earlier oracle with the same seed.
    pub fn resumed(graph: &'g Graph, seed: u64) -> Self {
        QueryOracle::with_rng(graph, stream_rng(seed, Stream::ResumedOracle))
    }

    pub fn with_rng(graph: &'g Graph, rng: SimRng) -> Self {
        QueryOracle {
            graph,
            rng,
            counts: QueryCounts::default(),
        }
    }

    /// Vertex count. Knowing `n` is part of the model, so this is free.
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn counts(&self) -> QueryCounts {
        self.counts
    }

    /// The underlying graph, for harness code that is allowed to bypass
    /// metering (exact distributions, good-set checks, edge indexing).
    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// A uniformly random vertex. Panics on an empty graph.
    pub fn uniform_vertex(&mut self) -> VertexId {
        assert!(self.graph.n() > 0, "uniform vertex query on an empty graph");
        self.counts.uniform_vertex += 1;
        self.rng.random_range(0..self.graph.n()) as VertexId
    }

    pub fn degree(&mut self, v: VertexId) -> Result<usize, OutOfRange> {
        self.check(v)?;
        self.counts.degree += 1;
        Ok(self.graph.degree(v))
    }

    /// The `i`-th neighbor of `v`, or `None` when `i >= degree(v)`.
    /// Counted either way.
    pub fn neighbor(&mut self, v: VertexId, i: usize) -> Result<Option<VertexId>, OutOfRange> {
        self.check(v)?;
        self.counts.neighbor += 1;
        Ok(self.graph.neighbors(v).get(i).copied())
    }

    /// A uniform neighbor of `v`, whose degree the caller already knows:
    /// one index draw from `rng`, then one neighbor query.
    /// Returns the chosen index and the neighbor, or `None` if `degree` is 0.
    pub fn uniform_neighbor<R: Rng + ?Sized>(
        &mut self,
        v: VertexId,
        degree: usize,
        rng: &mut R,
    ) -> Result<Option<(usize, VertexId)>, OutOfRange> {
        if degree == 0 {
            return Ok(None);
        }
        let i = rng.random_range(0..degree);
        Ok(self.neighbor(v, i)?.map(|w| (i, w)))
    }

    fn check(&self, v: VertexId) -> Result<(), OutOfRange> {
        if (v as usize) < self.graph.n() {
            Ok(())
        } else {
            Err(OutOfRange {
                vertex: v,
                n: self.graph.n(),
            })
        }
    }
}
