//! Brute-force check of the ε-good set conditions, with full graph access.

use serde::Serialize;

use crate::graph::{Graph, VertexId};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodSetReport {
    /// Every heavy `v` has `d_S(v) ∈ [(1-ε), (1+ε)]·|S|·d(v)/n`.
    pub heavy_condition: bool,
    /// `m(S)/|S| ∈ [d_avg/4, 12·d_avg]`.
    pub ratio_condition: bool,
    pub heavy_vertices: usize,
    pub heavy_violations: usize,
    /// A heavy vertex that violates its band, if any.
    pub first_violation: Option<VertexId>,
    /// Largest `|d_S(v) / (|S|·d(v)/n) - 1|` over heavy vertices (0 if none).
    pub worst_heavy_deviation: f64,
    /// `m(S)/|S|` divided by the true `d_avg`.
    pub ratio_to_avg: f64,
}

impl GoodSetReport {
    pub fn is_good(&self) -> bool {
        self.heavy_condition && self.ratio_condition
    }
}

/// Evaluates both conditions for the multiset `sample` (with multiplicity)
/// against the threshold `tau`, using the true average degree.
pub fn check_good_set(graph: &Graph, sample: &[VertexId], eps: f64, tau: f64) -> GoodSetReport {
    let n = graph.n() as f64;
    let s = sample.len() as f64;
    let mut multiplicity = vec![0u64; graph.n()];
    let mut m_s = 0u64;
    for &v in sample {
        multiplicity[v as usize] += 1;
        m_s += graph.degree(v) as u64;
    }

    let mut heavy_vertices = 0;
    let mut heavy_violations = 0;
    let mut first_violation = None;
    let mut worst: f64 = 0.0;
    for v in graph.vertices() {
        let d = graph.degree(v);
        if d as f64 <= tau {
            continue;
        }
        heavy_vertices += 1;
        let d_s: u64 = graph.neighbors(v).iter().map(|&w| multiplicity[w as usize]).sum();
        let expected = s * d as f64 / n;
        let d_s = d_s as f64;
        worst = worst.max((d_s / expected - 1.0).abs());
        if d_s < (1.0 - eps) * expected || d_s > (1.0 + eps) * expected {
            heavy_violations += 1;
            first_violation.get_or_insert(v);
        }
    }

    let avg = graph.avg_degree();
    let ratio = m_s as f64 / s;
    GoodSetReport {
        heavy_condition: heavy_violations == 0,
        ratio_condition: ratio >= 0.25 * avg && ratio <= 12.0 * avg,
        heavy_vertices,
        heavy_violations,
        first_violation,
        worst_heavy_deviation: worst,
        ratio_to_avg: ratio / avg,
    }
}
