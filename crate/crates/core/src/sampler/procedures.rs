use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SamplerState;
use crate::error::SamplerError;
use crate::graph::OrientedEdge;
use crate::oracle::QueryOracle;

/// Why a single light or heavy attempt produced no edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailCause {
    /// Light branch: rejection coin failed, or the vertex was isolated.
    LightReject,
    /// Heavy branch: rejection coin failed.
    HeavyReject,
    /// The reached vertex is on the other side of `τ`.
    WrongSide,
}

/// An accepted edge together with the position of `target` in the adjacency
/// list of `source`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeDraw {
    pub edge: OrientedEdge,
    pub position: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleOutcome {
    Edge(EdgeDraw),
    Fail(FailCause),
}

impl SampleOutcome {
    pub fn edge(&self) -> Option<OrientedEdge> {
        match self {
            SampleOutcome::Edge(draw) => Some(draw.edge),
            SampleOutcome::Fail(_) => None,
        }
    }
}

/// Result of [`sample_edge`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampledEdge {
    pub edge: OrientedEdge,
    pub position: usize,
    /// Loop iterations used, counting the successful one.
    pub iterations: u64,
}

/// One light attempt: uniform vertex `v`, its degree, and if `v` is light a
/// uniform neighbor `u`, kept with probability `d(v)/(τ·4γ̄)`.
///
/// Costs at most one uniform vertex, one degree and one neighbor query.
pub fn sample_light<R: Rng + ?Sized>(
    oracle: &mut QueryOracle<'_>,
    state: &SamplerState,
    rng: &mut R,
) -> SampleOutcome {
    #[cfg(debug_assertions)]
    let before = oracle.counts();

    let v = oracle.uniform_vertex();
    let d = oracle.degree(v).expect("oracle vertex in range");
    let outcome = if state.is_heavy_degree(d) {
        SampleOutcome::Fail(FailCause::WrongSide)
    } else {
        match oracle.uniform_neighbor(v, d, rng).expect("oracle vertex in range") {
            None => SampleOutcome::Fail(FailCause::LightReject),
            Some((position, u)) => {
                if rng.random::<f64>() < state.light_acceptance(d) {
                    SampleOutcome::Edge(EdgeDraw {
                        edge: OrientedEdge::new(v, u),
                        position,
                    })
                } else {
                    SampleOutcome::Fail(FailCause::LightReject)
                }
            }
        }
    };

    #[cfg(debug_assertions)]
    debug_assert!((oracle.counts() - before).total() <= 3);
    outcome
}

/// One heavy attempt: `v ∈ S` drawn with probability `d(v)/m(S)` from the
/// alias table, a uniform neighbor `u` of `v`, and if `u` is heavy a uniform
/// neighbor `w` of `u`, kept with probability `ε/(4x̄)`.
///
/// The degree of `v` comes from preprocessing, so this costs at most two
/// neighbor queries and one degree query.
pub fn sample_heavy<R: Rng + ?Sized>(
    oracle: &mut QueryOracle<'_>,
    state: &SamplerState,
    rng: &mut R,
) -> SampleOutcome {
    #[cfg(debug_assertions)]
    let before = oracle.counts();

    let j = state.alias.sample(rng);
    let v = state.sample[j];
    let dv = state.sample_degrees[j] as usize;
    let (_, u) = oracle
        .uniform_neighbor(v, dv, rng)
        .expect("oracle vertex in range")
        .expect("alias table never yields a zero-degree vertex");
    let du = oracle.degree(u).expect("oracle vertex in range");
    let outcome = if !state.is_heavy_degree(du) {
        SampleOutcome::Fail(FailCause::WrongSide)
    } else {
        let (position, w) = oracle
            .uniform_neighbor(u, du, rng)
            .expect("oracle vertex in range")
            .expect("heavy vertex has neighbors");
        if rng.random::<f64>() < state.heavy_acceptance() {
            SampleOutcome::Edge(EdgeDraw {
                edge: OrientedEdge::new(u, w),
                position,
            })
        } else {
            SampleOutcome::Fail(FailCause::HeavyReject)
        }
    };

    #[cfg(debug_assertions)]
    debug_assert!((oracle.counts() - before).total() <= 3);
    outcome
}

/// `⌈(192·x̄/ε)·64⌉`.
pub fn iteration_cap(state: &SamplerState) -> u64 {
    (state.iteration_bound() * 64.0).ceil() as u64
}

/// Flips a fair coin between [`sample_light`] and [`sample_heavy`] until one
/// returns an edge.
///
/// Gives up with [`SamplerError::IterationCap`] after [`iteration_cap`]
/// iterations. Under a good state the chance of that is below `2^-64`.
pub fn sample_edge<R: Rng + ?Sized>(
    oracle: &mut QueryOracle<'_>,
    state: &SamplerState,
    rng: &mut R,
) -> Result<SampledEdge, SamplerError> {
    let cap = iteration_cap(state);
    for iterations in 1..=cap {
        let outcome = if rng.random::<bool>() {
            sample_heavy(oracle, state, rng)
        } else {
            sample_light(oracle, state, rng)
        };
        if let SampleOutcome::Edge(draw) = outcome {
            return Ok(SampledEdge {
                edge: draw.edge,
                position: draw.position,
                iterations,
            });
        }
    }
    Err(SamplerError::IterationCap { iterations: cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::{DegreeEstimate, EstimatorMode};
    use crate::gen::GenSpec;
    use crate::graph::Graph;
    use crate::rng::{stream_rng, Stream};
    use crate::sampler::{preprocess, preprocess_with_estimate, SamplerConfig};

    fn star11() -> Graph {
        GenSpec::Star { n: 11 }.generate(0).unwrap()
    }

    #[test]
    fn acceptance_probabilities_are_valid() {
        let g = GenSpec::Lollipop { k: 10, path_len: 40 }.generate(0).unwrap();
        for (eps, x) in [(0.1, 1.0), (0.25, 4.0), (0.49, 1.0)] {
            let mut o = QueryOracle::new(&g, 1);
            let state = preprocess(&mut o, &SamplerConfig::new(eps, 0.1, x, 1)).unwrap();
            assert!(state.gamma_bar() >= 0.25);
            let tau_floor = state.tau().floor() as usize;
            assert!(state.light_acceptance(tau_floor) <= 1.0);
            assert!(state.heavy_acceptance() < 1.0);
        }
    }

    #[test]
    fn light_never_returns_heavy_sources() {
        // τ = 1·(20/11)/0.25 ≈ 7.3 < 10, so the center is heavy.
        let g = star11();
        let mut o = QueryOracle::new(&g, 4);
        let state = preprocess(&mut o, &SamplerConfig::new(0.25, 0.1, 1.0, 4)).unwrap();
        assert!(state.tau() < 10.0);
        let mut rng = stream_rng(4, Stream::Sampling);
        let mut light_hits = 0;
        let mut heavy_hits = 0;
        for _ in 0..20_000 {
            if let Some(e) = sample_light(&mut o, &state, &mut rng).edge() {
                assert_ne!(e.source, 0);
                light_hits += 1;
            }
            if let Some(e) = sample_heavy(&mut o, &state, &mut rng).edge() {
                assert_eq!(e.source, 0);
                heavy_hits += 1;
            }
        }
        assert!(light_hits > 0 && heavy_hits > 0);
    }

    #[test]
    fn wrong_side_outcomes() {
        let g = star11();
        let mut o = QueryOracle::new(&g, 2);
        let state = preprocess(&mut o, &SamplerConfig::new(0.25, 0.1, 1.0, 2)).unwrap();
        let mut rng = stream_rng(2, Stream::Sampling);
        let mut saw_light_wrong_side = false;
        for _ in 0..2_000 {
            let before = o.counts();
            if sample_light(&mut o, &state, &mut rng) == SampleOutcome::Fail(FailCause::WrongSide) {
                saw_light_wrong_side = true;
                // uniform vertex + degree, no neighbor query
                assert_eq!((o.counts() - before).total(), 2);
            }
        }
        assert!(saw_light_wrong_side);
    }

    #[test]
    fn isolated_vertex_fails_light_without_neighbor_query() {
        let g = Graph::parse_edge_list("# n=50\n0 1\n1 2\n2 3").unwrap();
        let mut o = QueryOracle::new(&g, 0);
        let estimate = DegreeEstimate {
            avg_degree: g.avg_degree(),
            queries_used: 0,
            mode: EstimatorMode::Exact,
        };
        let config = SamplerConfig::new(0.25, 0.1, 1.0, 0);
        let state = preprocess_with_estimate(&mut o, &config, &estimate).unwrap();
        let mut rng = stream_rng(0, Stream::Sampling);
        let mut isolated = 0;
        for _ in 0..500 {
            let before = o.counts();
            let outcome = sample_light(&mut o, &state, &mut rng);
            let delta = o.counts() - before;
            if delta.neighbor == 0 && outcome == SampleOutcome::Fail(FailCause::LightReject) {
                isolated += 1;
            }
            assert!(delta.total() <= 3);
        }
        assert!(isolated > 0);
    }

    #[test]
    fn sample_edge_respects_cap_and_returns_real_edges() {
        let g = GenSpec::Lollipop { k: 8, path_len: 20 }.generate(0).unwrap();
        let mut o = QueryOracle::new(&g, 5);
        let state = preprocess(&mut o, &SamplerConfig::new(0.25, 0.1, 2.0, 5)).unwrap();
        let mut rng = stream_rng(5, Stream::Sampling);
        for _ in 0..1000 {
            let s = sample_edge(&mut o, &state, &mut rng).unwrap();
            assert_eq!(g.neighbors(s.edge.source)[s.position], s.edge.target);
            assert!(s.iterations >= 1 && s.iterations <= iteration_cap(&state));
        }
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let g = GenSpec::Lollipop { k: 8, path_len: 20 }.generate(0).unwrap();
        let run = || {
            let mut o = QueryOracle::new(&g, 11);
            let state = preprocess(&mut o, &SamplerConfig::new(0.25, 0.1, 2.0, 11)).unwrap();
            let mut rng = stream_rng(11, Stream::Sampling);
            (0..50)
                .map(|_| sample_edge(&mut o, &state, &mut rng).unwrap().edge)
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}
