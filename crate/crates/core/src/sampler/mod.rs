//! Amortized edge sampling: a one-off preprocessing phase that builds an
//! alias table over a random vertex multiset `S`, and a per-sample rejection
//! loop that combines a light-vertex branch with a heavy-vertex branch
//! reached through `S`.
//!
//! With threshold `τ = x̄·d̄_avg/ε`, an edge `(v, u)` is light when
//! `d(v) ≤ τ` and heavy otherwise. Light edges are returned by
//! [`sample_light`] with probability exactly `1/(n·τ·4γ̄)` per call; heavy
//! edges by [`sample_heavy`] with probability `d_S(u)/(m(S)·d(u))·ε/(4x̄)`,
//! which is within `1 ± ε` of the light value whenever `S` is ε-good.

mod config;
mod exact;
mod persist;
mod procedures;

pub use config::{multiset_size, repetitions, SamplerConfig};
pub use exact::{exact_distribution, return_probabilities, ReturnProbabilities};
pub use persist::{StateDocument, STATE_FORMAT, STATE_VERSION};
pub use procedures::{
    iteration_cap, sample_edge, sample_heavy, sample_light, EdgeDraw, FailCause, SampleOutcome,
    SampledEdge,
};

use serde::Serialize;

use crate::alias::AliasTable;
use crate::error::{EstimatorError, SamplerError};
use crate::estimator::{estimate_avg_degree, DegreeEstimate};
use crate::graph::VertexId;
use crate::oracle::QueryOracle;
use crate::rng::{stream_rng, Stream};

/// Output of a successful preprocessing run.
#[derive(Debug, Clone)]
pub struct SamplerState {
    pub(crate) n: usize,
    pub(crate) config: SamplerConfig,
    pub(crate) avg_degree_estimate: f64,
    pub(crate) x_bar: f64,
    pub(crate) tau: f64,
    pub(crate) gamma_bar: f64,
    pub(crate) repetitions: u32,
    pub(crate) sets_drawn: u32,
    /// `S`, with multiplicity, in draw order.
    pub(crate) sample: Vec<VertexId>,
    /// Degrees of the entries of `S`, queried once during preprocessing.
    pub(crate) sample_degrees: Vec<u32>,
    /// `m(S)`.
    pub(crate) sample_degree_sum: u64,
    pub(crate) alias: AliasTable,
}

/// Scalar summary of a state, for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateSummary {
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
    pub x: f64,
    pub x_bar: f64,
    pub tau: f64,
    pub gamma_bar: f64,
    pub avg_degree_estimate: f64,
    pub t: u32,
    pub s: usize,
    pub sets_drawn: u32,
    pub sample_degree_sum: u64,
}

impl SamplerState {
    pub(crate) fn assemble(
        n: usize,
        config: SamplerConfig,
        avg_degree_estimate: f64,
        repetitions: u32,
        sets_drawn: u32,
        sample: Vec<VertexId>,
        sample_degrees: Vec<u32>,
    ) -> Result<SamplerState, SamplerError> {
        if sample.is_empty() || sample.len() != sample_degrees.len() {
            return Err(SamplerError::InvalidState("S and its degree list disagree or are empty".into()));
        }
        if !(avg_degree_estimate > 0.0 && avg_degree_estimate.is_finite()) {
            return Err(SamplerError::InvalidState(format!(
                "average-degree estimate {avg_degree_estimate} is not positive"
            )));
        }
        let x_bar = clamp_tradeoff(config.x, n, avg_degree_estimate);
        let tau = x_bar * avg_degree_estimate / config.eps;
        let sample_degree_sum: u64 = sample_degrees.iter().map(|&d| d as u64).sum();
        let gamma_bar = sample_degree_sum as f64 / (avg_degree_estimate * sample.len() as f64);
        let weights: Vec<f64> = sample_degrees.iter().map(|&d| d as f64).collect();
        let alias = AliasTable::new(&weights)
            .map_err(|e| SamplerError::InvalidState(format!("cannot index S: {e}")))?;
        Ok(SamplerState {
            n,
            config,
            avg_degree_estimate,
            x_bar,
            tau,
            gamma_bar,
            repetitions,
            sets_drawn,
            sample,
            sample_degrees,
            sample_degree_sum,
            alias,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    pub fn eps(&self) -> f64 {
        self.config.eps
    }

    /// `d̄_avg`, the estimate the state was built from.
    pub fn avg_degree_estimate(&self) -> f64 {
        self.avg_degree_estimate
    }

    /// `x̄ = min{x, √(n/d̄_avg)}`.
    pub fn x_bar(&self) -> f64 {
        self.x_bar
    }

    /// Degree threshold `τ = x̄·d̄_avg/ε`.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `γ̄ = m(S)/(d̄_avg·|S|)`.
    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    /// `t`, the number of candidate multisets allowed.
    pub fn repetitions(&self) -> u32 {
        self.repetitions
    }

    /// How many candidate multisets were drawn before one was accepted.
    pub fn sets_drawn(&self) -> u32 {
        self.sets_drawn
    }

    /// `s = |S|`.
    pub fn sample_size(&self) -> usize {
        self.sample.len()
    }

    pub fn sample(&self) -> &[VertexId] {
        &self.sample
    }

    pub fn sample_degrees(&self) -> &[u32] {
        &self.sample_degrees
    }

    /// `m(S)`, counting multiplicity.
    pub fn sample_degree_sum(&self) -> u64 {
        self.sample_degree_sum
    }

    pub fn is_heavy_degree(&self, degree: usize) -> bool {
        degree as f64 > self.tau
    }

    /// Probability that [`sample_light`] accepts a candidate of degree `d`.
    pub fn light_acceptance(&self, degree: usize) -> f64 {
        degree as f64 / (self.tau * 4.0 * self.gamma_bar)
    }

    /// Probability that [`sample_heavy`] accepts a candidate edge.
    pub fn heavy_acceptance(&self) -> f64 {
        self.config.eps / (4.0 * self.x_bar)
    }

    /// Loose bound on the mean number of loop iterations of
    /// [`sample_edge`]: `192·x̄/ε`.
    pub fn iteration_bound(&self) -> f64 {
        192.0 * self.x_bar / self.config.eps
    }

    pub fn summary(&self) -> StateSummary {
        StateSummary {
            n: self.n,
            eps: self.config.eps,
            delta: self.config.delta,
            x: self.config.x,
            x_bar: self.x_bar,
            tau: self.tau,
            gamma_bar: self.gamma_bar,
            avg_degree_estimate: self.avg_degree_estimate,
            t: self.repetitions,
            s: self.sample.len(),
            sets_drawn: self.sets_drawn,
            sample_degree_sum: self.sample_degree_sum,
        }
    }
}

/// `x̄ = min{x, √(n/d̄)}`. For a good estimate `d̄ ≤ d_avg < n`, so the
/// square root exceeds 1; the lower clamp only matters for a wildly
/// overestimated `d̄`, where it keeps the heavy acceptance below 1.
fn clamp_tradeoff(x: f64, n: usize, avg_degree_estimate: f64) -> f64 {
    x.min((n as f64 / avg_degree_estimate).sqrt()).max(1.0)
}

/// Runs the average-degree estimator selected by `config.estimator` with
/// failure budget `δ/3`, then [`preprocess_with_estimate`].
pub fn preprocess(oracle: &mut QueryOracle<'_>, config: &SamplerConfig) -> Result<SamplerState, SamplerError> {
    config.validate()?;
    if oracle.n() == 0 {
        return Err(SamplerError::NoEdges);
    }
    let mut rng = stream_rng(config.seed, Stream::Estimator);
    let estimate = estimate_avg_degree(oracle, config.estimator, config.eps, config.delta / 3.0, &mut rng)
        .map_err(|e| match e {
            EstimatorError::NoEdges => SamplerError::NoEdges,
            other => SamplerError::Estimator(other),
        })?;
    preprocess_with_estimate(oracle, config, &estimate)
}

/// Preprocessing given an already computed `d̄_avg`.
///
/// Draws up to `t` multisets of `s` uniform vertices, querying each degree,
/// and keeps the first with `m(S_i)/s ∈ [d̄/4, 12·d̄]`. Multisets are drawn
/// lazily: `S_{i+1}` is only sampled if `S_i` was rejected.
pub fn preprocess_with_estimate(
    oracle: &mut QueryOracle<'_>,
    config: &SamplerConfig,
    estimate: &DegreeEstimate,
) -> Result<SamplerState, SamplerError> {
    config.validate()?;
    let n = oracle.n();
    if n == 0 {
        return Err(SamplerError::NoEdges);
    }
    let avg = estimate.avg_degree;
    if !(avg > 0.0 && avg.is_finite()) {
        return Err(SamplerError::InvalidState(format!("average-degree estimate {avg} is not positive")));
    }
    let x_bar = clamp_tradeoff(config.x, n, avg);
    let tau = x_bar * avg / config.eps;
    let t = config.repetitions();
    let s = multiset_size(n, tau, config.eps, config.delta, t);
    let (low, high) = (0.25 * avg, 12.0 * avg);

    let mut sample = Vec::with_capacity(s);
    let mut degrees = Vec::with_capacity(s);
    for i in 1..=t {
        sample.clear();
        degrees.clear();
        let mut sum = 0u64;
        for _ in 0..s {
            let v = oracle.uniform_vertex();
            let d = oracle.degree(v).expect("oracle vertex in range");
            sample.push(v);
            degrees.push(d as u32);
            sum += d as u64;
        }
        let ratio = sum as f64 / s as f64;
        if ratio >= low && ratio <= high {
            return SamplerState::assemble(n, *config, avg, t, i, sample, degrees);
        }
    }
    Err(SamplerError::NoSetAccepted { sets: t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::EstimatorMode;
    use crate::gen::GenSpec;
    use crate::graph::Graph;

    fn ring() -> Graph {
        GenSpec::Ring { n: 100, half_degree: 2 }.generate(0).unwrap()
    }

    #[test]
    fn regular_graph_parameters() {
        let g = ring();
        let mut o = QueryOracle::new(&g, 3);
        let config = SamplerConfig::new(0.4, 0.1, 1.0, 3);
        let state = preprocess(&mut o, &config).unwrap();
        assert_eq!(state.avg_degree_estimate(), 4.0);
        assert_eq!(state.x_bar(), 1.0);
        assert!((state.tau() - 10.0).abs() < 1e-12);
        assert_eq!(state.gamma_bar(), 1.0);
        assert_eq!(state.sets_drawn(), 1);
        assert_eq!(state.repetitions(), 4);
        let s = multiset_size(100, state.tau(), 0.4, 0.1, 4);
        assert_eq!(state.sample_size(), s);
        // n degree queries for the exact estimator, then s for S_1.
        assert_eq!(o.counts().degree, 100 + s as u64);
        assert_eq!(o.counts().uniform_vertex, s as u64);
        assert_eq!(o.counts().neighbor, 0);
    }

    #[test]
    fn x_bar_is_clamped_by_density() {
        let g = GenSpec::Clique { k: 10 }.generate(0).unwrap();
        let mut o = QueryOracle::new(&g, 0);
        let state = preprocess(&mut o, &SamplerConfig::new(0.25, 0.1, 50.0, 0)).unwrap();
        // √(10/9) < 50
        assert!((state.x_bar() - (10.0f64 / 9.0).sqrt()).abs() < 1e-12);
        assert!((state.tau() - state.x_bar() * 9.0 / 0.25).abs() < 1e-9);
    }

    #[test]
    fn no_edges_is_rejected() {
        let g = Graph::parse_edge_list("# n=4\n").unwrap();
        let mut o = QueryOracle::new(&g, 0);
        let err = preprocess(&mut o, &SamplerConfig::new(0.25, 0.1, 1.0, 0)).unwrap_err();
        assert_eq!(err, SamplerError::NoEdges);
        let empty = Graph::parse_edge_list("").unwrap();
        let mut o = QueryOracle::new(&empty, 0);
        assert_eq!(
            preprocess(&mut o, &SamplerConfig::new(0.25, 0.1, 1.0, 0)).unwrap_err(),
            SamplerError::NoEdges
        );
    }

    #[test]
    fn invalid_config_is_rejected() {
        let g = ring();
        let mut o = QueryOracle::new(&g, 0);
        assert!(matches!(
            preprocess(&mut o, &SamplerConfig::new(0.5, 0.1, 1.0, 0)),
            Err(SamplerError::InvalidConfig(_))
        ));
        assert_eq!(o.counts().total(), 0);
    }

    #[test]
    fn hopeless_estimate_fails_after_t_sets() {
        // An estimate 100x too large makes every m(S_i)/s fall below d̄/4.
        let g = ring();
        let mut o = QueryOracle::new(&g, 0);
        let config = SamplerConfig::new(0.25, 1.0 / 3.0, 1.0, 0);
        let estimate = DegreeEstimate {
            avg_degree: 400.0,
            queries_used: 0,
            mode: EstimatorMode::Exact,
        };
        let err = preprocess_with_estimate(&mut o, &config, &estimate).unwrap_err();
        assert_eq!(err, SamplerError::NoSetAccepted { sets: 2 });
        let x_bar = 1.0;
        let s = multiset_size(100, x_bar * 400.0 / 0.25, 0.25, 1.0 / 3.0, 2);
        assert_eq!(o.counts().degree, 2 * s as u64);
    }

    #[test]
    fn sublinear_estimator_feeds_preprocessing() {
        let g = GenSpec::Clique { k: 64 }.generate(0).unwrap();
        let mut o = QueryOracle::new(&g, 9);
        let config = SamplerConfig::new(0.25, 0.1, 1.0, 9).with_estimator(EstimatorMode::Sublinear);
        let state = preprocess(&mut o, &config).unwrap();
        assert!(state.avg_degree_estimate() <= 63.0);
        assert!((0.25..=12.0).contains(&state.gamma_bar()));
    }
}
