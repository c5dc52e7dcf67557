//! Deterministic graph generators.
//!
//! The families are picked to exercise the light/heavy split: stars and
//! lollipops have a few hubs and many low-degree vertices, a clique glued to
//! an unbalanced complete bipartite graph puts most edges on a handful of
//! heavy vertices, and regular rings have no heavy vertices at all.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::{Graph, VertexId};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum GenSpec {
    /// Vertex 0 joined to `n - 1` leaves.
    Star { n: usize },
    Clique { k: usize },
    /// A `k`-clique with a path of `path_len` extra vertices hanging off
    /// vertex `k - 1`.
    Lollipop { k: usize, path_len: usize },
    /// G(n, p); the only seeded family.
    ErdosRenyi { n: usize, p: f64 },
    /// A `clique`-clique next to a disjoint complete bipartite graph
    /// K(`left`, `right`).
    CliquePlusBipartite { clique: usize, left: usize, right: usize },
    /// Circulant graph: vertex `i` is adjacent to `i ± 1, …, i ± half_degree`
    /// (mod n), so every degree is `2 * half_degree`.
    Ring { n: usize, half_degree: usize },
}

impl GenSpec {
    /// Builds the graph. Only Erdős–Rényi consumes `seed`.
    pub fn generate(&self, seed: u64) -> Result<Graph, GraphError> {
        let degenerate = |why: &str| Err(GraphError::Degenerate(format!("{self}: {why}")));
        let (n, edges) = match *self {
            GenSpec::Star { n } => {
                if n < 2 {
                    return degenerate("a star needs at least two vertices");
                }
                (n, (1..n).map(|leaf| (0, leaf as VertexId)).collect())
            }
            GenSpec::Clique { k } => {
                if k < 2 {
                    return degenerate("a clique needs at least two vertices");
                }
                (k, clique_edges(0, k))
            }
            GenSpec::Lollipop { k, path_len } => {
                if k < 2 {
                    return degenerate("the clique part needs at least two vertices");
                }
                let mut edges = clique_edges(0, k);
                for i in 0..path_len {
                    let v = (k + i) as VertexId;
                    edges.push((v - 1, v));
                }
                (k + path_len, edges)
            }
            GenSpec::ErdosRenyi { n, p } => {
                if !(0.0..=1.0).contains(&p) {
                    return degenerate("p must lie in [0, 1]");
                }
                let mut rng = stream_rng(seed, Stream::Generator);
                let mut edges = Vec::new();
                for u in 0..n {
                    for v in u + 1..n {
                        if rng.random_bool(p) {
                            edges.push((u as VertexId, v as VertexId));
                        }
                    }
                }
                (n, edges)
            }
            GenSpec::CliquePlusBipartite {
                clique,
                left,
                right,
            } => {
                let mut edges = clique_edges(0, clique);
                for a in 0..left {
                    for b in 0..right {
                        edges.push(((clique + a) as VertexId, (clique + left + b) as VertexId));
                    }
                }
                (clique + left + right, edges)
            }
            GenSpec::Ring { n, half_degree } => {
                if 2 * half_degree >= n {
                    return degenerate("need 2 * half_degree < n");
                }
                let mut edges = Vec::new();
                for i in 0..n {
                    for j in 1..=half_degree {
                        edges.push((i as VertexId, ((i + j) % n) as VertexId));
                    }
                }
                (n, edges)
            }
        };
        if n == 0 || edges.is_empty() {
            return degenerate("graph has no edges");
        }
        Graph::from_edges(n, &edges)
    }
}

fn clique_edges(first: usize, k: usize) -> Vec<(VertexId, VertexId)> {
    let mut edges = Vec::with_capacity(k * k.saturating_sub(1) / 2);
    for u in first..first + k {
        for v in u + 1..first + k {
            edges.push((u as VertexId, v as VertexId));
        }
    }
    edges
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GenSpec::Star { n } => write!(f, "star:{n}"),
            GenSpec::Clique { k } => write!(f, "clique:{k}"),
            GenSpec::Lollipop { k, path_len } => write!(f, "lollipop:{k},{path_len}"),
            GenSpec::ErdosRenyi { n, p } => write!(f, "erdos_renyi:{n},{p}"),
            GenSpec::CliquePlusBipartite {
                clique,
                left,
                right,
            } => write!(f, "clique_plus_bipartite:{clique},{left},{right}"),
            GenSpec::Ring { n, half_degree } => write!(f, "ring:{n},{half_degree}"),
        }
    }
}

impl FromStr for GenSpec {
    type Err = GraphError;

    /// Parses `family:arg,arg,...`, e.g. `star:11`, `lollipop:10,50`,
    /// `erdos_renyi:1000,0.01` (alias `er`), `clique_plus_bipartite:20,5,200`
    /// (alias `cpb`), `ring:100,2`.
    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let bad = |message: String| GraphError::BadSpec {
            spec: spec.to_string(),
            message,
        };
        let (family, args) = spec
            .split_once(':')
            .ok_or_else(|| bad("expected family:args".into()))?;
        let args: Vec<&str> = args.split(',').map(str::trim).collect();
        let arity = |k: usize| {
            if args.len() == k {
                Ok(())
            } else {
                Err(bad(format!("{family} takes {k} argument(s), got {}", args.len())))
            }
        };
        let int = |i: usize| {
            args[i]
                .parse::<usize>()
                .map_err(|e| bad(format!("argument {:?}: {e}", args[i])))
        };
        match family.trim() {
            "star" => {
                arity(1)?;
                Ok(GenSpec::Star { n: int(0)? })
            }
            "clique" => {
                arity(1)?;
                Ok(GenSpec::Clique { k: int(0)? })
            }
            "lollipop" => {
                arity(2)?;
                Ok(GenSpec::Lollipop {
                    k: int(0)?,
                    path_len: int(1)?,
                })
            }
            "er" | "erdos_renyi" => {
                arity(2)?;
                let p = args[1]
                    .parse::<f64>()
                    .map_err(|e| bad(format!("argument {:?}: {e}", args[1])))?;
                Ok(GenSpec::ErdosRenyi { n: int(0)?, p })
            }
            "cpb" | "clique_plus_bipartite" => {
                arity(3)?;
                Ok(GenSpec::CliquePlusBipartite {
                    clique: int(0)?,
                    left: int(1)?,
                    right: int(2)?,
                })
            }
            "ring" => {
                arity(2)?;
                Ok(GenSpec::Ring {
                    n: int(0)?,
                    half_degree: int(1)?,
                })
            }
            other => Err(bad(format!("unknown family {other:?}"))),
        }
    }
}

impl From<GenSpec> for String {
    fn from(spec: GenSpec) -> String {
        spec.to_string()
    }
}

impl TryFrom<String> for GenSpec {
    type Error = GraphError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}
