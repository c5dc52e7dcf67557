//! Closed-form output distribution of the sampler for a fixed `S`.
//!
//! Harness-side: reads the whole graph directly and never touches an oracle.

use super::SamplerState;
use crate::graph::Graph;
use crate::harness::EdgeDistribution;

/// Per-call return probability of every oriented edge, in
/// [`Graph::oriented_edges`] order, from the branch that can return it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnProbabilities {
    /// Probability that one [`sample_light`](super::sample_light) or
    /// [`sample_heavy`](super::sample_heavy) call returns the edge.
    pub per_call: Vec<f64>,
    /// Whether the edge's source is heavy (`d > τ`).
    pub heavy: Vec<bool>,
    /// `1/(n·τ·4γ̄)`, shared by all light edges.
    pub light_edge: f64,
}

impl ReturnProbabilities {
    /// Probability that one loop iteration of
    /// [`sample_edge`](super::sample_edge) succeeds: half the total mass.
    pub fn iteration_success(&self) -> f64 {
        0.5 * self.per_call.iter().sum::<f64>()
    }

    pub fn expected_iterations(&self) -> f64 {
        1.0 / self.iteration_success()
    }
}

/// `d_S(u)` for every vertex: neighbors of `u` in `S`, counting multiplicity.
pub(crate) fn neighbors_in_sample(graph: &Graph, state: &SamplerState) -> Vec<u64> {
    let mut multiplicity = vec![0u64; graph.n()];
    for &v in &state.sample {
        multiplicity[v as usize] += 1;
    }
    graph
        .vertices()
        .map(|u| graph.neighbors(u).iter().map(|&w| multiplicity[w as usize]).sum())
        .collect()
}

/// Light edges: `1/(n·τ·4γ̄)`. Heavy edge `(u, w)`:
/// `d_S(u)/(m(S)·d(u)) · ε/(4x̄)`.
pub fn return_probabilities(graph: &Graph, state: &SamplerState) -> ReturnProbabilities {
    let light_edge = 1.0 / (graph.n() as f64 * state.tau * 4.0 * state.gamma_bar);
    let d_s = neighbors_in_sample(graph, state);
    let m_s = state.sample_degree_sum as f64;
    let heavy_accept = state.heavy_acceptance();

    let mut per_call = Vec::with_capacity(graph.m());
    let mut heavy = Vec::with_capacity(graph.m());
    for u in graph.vertices() {
        let d = graph.degree(u);
        let is_heavy = state.is_heavy_degree(d);
        let p = if is_heavy {
            d_s[u as usize] as f64 / (m_s * d as f64) * heavy_accept
        } else {
            light_edge
        };
        per_call.extend(std::iter::repeat_n(p, d));
        heavy.extend(std::iter::repeat_n(is_heavy, d));
    }
    ReturnProbabilities {
        per_call,
        heavy,
        light_edge,
    }
}

/// The distribution of [`sample_edge`](super::sample_edge)'s output given
/// `state`: per-call masses normalized by their total.
pub fn exact_distribution(graph: &Graph, state: &SamplerState) -> EdgeDistribution {
    let probs = return_probabilities(graph, state);
    let total: f64 = probs.per_call.iter().sum();
    EdgeDistribution::exact(probs.per_call.iter().map(|p| p / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::GenSpec;
    use crate::oracle::QueryOracle;
    use crate::sampler::{preprocess, SamplerConfig};

    #[test]
    fn regular_all_light_graph_is_uniform() {
        let g = GenSpec::Ring { n: 100, half_degree: 2 }.generate(0).unwrap();
        let mut o = QueryOracle::new(&g, 0);
        let state = preprocess(&mut o, &SamplerConfig::new(0.4, 0.1, 1.0, 0)).unwrap();
        let before = o.counts();
        let probs = return_probabilities(&g, &state);
        assert_eq!(o.counts(), before);
        // 1/(n·τ·4γ̄) = 1/(100·10·4·1)
        assert!((probs.light_edge - 1.0 / 4000.0).abs() < 1e-15);
        let dist = exact_distribution(&g, &state);
        assert!(dist.masses().iter().all(|&p| (p - 1.0 / 400.0).abs() < 1e-15));
        assert!((dist.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn star_leaves_are_symmetric() {
        let g = GenSpec::Star { n: 11 }.generate(0).unwrap();
        let mut o = QueryOracle::new(&g, 7);
        let state = preprocess(&mut o, &SamplerConfig::new(0.25, 0.1, 1.0, 7)).unwrap();
        assert!(state.tau() < 10.0);
        let dist = exact_distribution(&g, &state);
        let masses = dist.masses();
        // Center edges come first in oriented order.
        assert!(masses[..10].iter().all(|&p| p == masses[0]));
        assert!(masses[10..].iter().all(|&p| p == masses[10]));
        assert!((dist.total() - 1.0).abs() < 1e-12);

        let probs = return_probabilities(&g, &state);
        assert!(probs.heavy[..10].iter().all(|&h| h));
        assert!(!probs.heavy[10..].iter().any(|&h| h));
        // d_S(center) is the number of leaf entries in S.
        let leaves_in_s = state.sample().iter().filter(|&&v| v != 0).count() as f64;
        let want = leaves_in_s / (state.sample_degree_sum() as f64 * 10.0) * 0.25 / (4.0 * state.x_bar());
        assert!((probs.per_call[0] - want).abs() <= 1e-15 * want.max(1.0));
    }
}
