//! Average-degree estimation.
//!
//! Two modes share one output type. `Exact` queries every degree and is the
//! baseline used by tests that must isolate sampler behavior from estimator
//! noise. `Sublinear` is a degree-bucketing estimator in the style of
//! Goldreich and Ron: sampled vertices are grouped into geometric degree
//! buckets, vertices in well-populated buckets contribute their degree, and
//! edges running into sparsely sampled buckets are credited by a random
//! neighbor probe from the well-populated side. The raw estimate is two-sided
//! and is deflated by `1 + ε/3` so that it lands in the one-sided band
//! `[(1-ε)·d_avg, d_avg]`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::EstimatorError;
use crate::graph::VertexId;
use crate::oracle::QueryOracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorMode {
    #[default]
    Exact,
    Sublinear,
}

impl std::str::FromStr for EstimatorMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(EstimatorMode::Exact),
            "sublinear" => Ok(EstimatorMode::Sublinear),
            other => Err(format!("unknown estimator mode {other:?} (expected exact|sublinear)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeEstimate {
    /// Estimate of `m/n`, always positive.
    pub avg_degree: f64,
    pub queries_used: u64,
    pub mode: EstimatorMode,
}

impl DegreeEstimate {
    /// Whether the estimate lies in `[(1-ε)·true_avg, true_avg]`.
    pub fn is_good(&self, true_avg: f64, eps: f64) -> bool {
        in_good_band(self.avg_degree, true_avg, eps)
    }
}

pub fn in_good_band(estimate: f64, true_avg: f64, eps: f64) -> bool {
    estimate >= (1.0 - eps) * true_avg && estimate <= true_avg
}

/// `m/n` from one degree query per vertex.
pub fn estimate_avg_degree_exact(oracle: &mut QueryOracle<'_>) -> Result<DegreeEstimate, EstimatorError> {
    let before = oracle.counts();
    let n = oracle.n();
    let mut m = 0u64;
    for v in 0..n as VertexId {
        m += oracle.degree(v).expect("vertex in range") as u64;
    }
    if m == 0 {
        return Err(EstimatorError::NoEdges);
    }
    Ok(DegreeEstimate {
        avg_degree: m as f64 / n as f64,
        queries_used: (oracle.counts() - before).total(),
        mode: EstimatorMode::Exact,
    })
}

/// One sampled vertex: its degree and, when it has any neighbors, the degree
/// of one uniformly chosen neighbor.
#[derive(Debug, Clone, Copy)]
struct Probe {
    degree: usize,
    neighbor_degree: Option<usize>,
}

/// Bucket geometry: bucket 0 holds degree 0, bucket `i ≥ 1` holds degrees in
/// `((1+β)^(i-1), (1+β)^i]` (with degree 1 in bucket 1).
#[derive(Debug, Clone, Copy)]
struct Buckets {
    log_base: f64,
}

impl Buckets {
    fn new(beta: f64) -> Self {
        Buckets {
            log_base: (1.0 + beta).ln(),
        }
    }

    fn of(&self, degree: usize) -> usize {
        if degree == 0 {
            0
        } else {
            1 + ((degree as f64).ln() / self.log_base).ceil().max(0.0) as usize
        }
    }

    fn count(&self, n: usize) -> usize {
        self.of(n.max(1)) + 1
    }
}

/// Tuning of the sublinear estimator; the defaults are what
/// [`estimate_avg_degree_sublinear`] uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SublinearParams {
    /// Minimum sample count is `ceil(min_samples_factor · √n / ε)`.
    pub min_samples_factor: f64,
    /// Query budget is `budget_factor · n`.
    pub budget_factor: u64,
    /// A bucket needs at least this many sampled vertices to count as well
    /// populated, whatever its sampled share.
    pub min_large_hits: usize,
}

impl Default for SublinearParams {
    fn default() -> Self {
        SublinearParams {
            min_samples_factor: 2.0,
            budget_factor: 64,
            min_large_hits: 8,
        }
    }
}

/// Estimates `d_avg` with `O*(√n)` queries on graphs without a heavy tail of
/// isolated vertices.
///
/// Samples vertices in doubling batches until the empirical relative
/// standard error of the raw estimate drops below `ε / (3z)`, with
/// `z = √(2 ln(2/δ))`. Graphs with no edges (or so few that the stopping
/// rule is never met) fail once the `64·n` query budget is spent.
pub fn estimate_avg_degree_sublinear<R: Rng + ?Sized>(
    oracle: &mut QueryOracle<'_>,
    eps: f64,
    delta: f64,
    rng: &mut R,
) -> Result<DegreeEstimate, EstimatorError> {
    estimate_avg_degree_sublinear_with(oracle, eps, delta, rng, SublinearParams::default())
}

pub fn estimate_avg_degree_sublinear_with<R: Rng + ?Sized>(
    oracle: &mut QueryOracle<'_>,
    eps: f64,
    delta: f64,
    rng: &mut R,
    params: SublinearParams,
) -> Result<DegreeEstimate, EstimatorError> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(EstimatorError::InvalidParameter(format!("ε={eps} not in (0, 1/2)")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(EstimatorError::InvalidParameter(format!("δ={delta} not in (0, 1)")));
    }
    let n = oracle.n();
    if n == 0 {
        return Err(EstimatorError::NoEdges);
    }
    let before = oracle.counts();
    let budget = params.budget_factor * n as u64;
    let buckets = Buckets::new(eps / 8.0);
    let z = (2.0 * (2.0 / delta).ln()).sqrt();
    let min_samples = (params.min_samples_factor * (n as f64).sqrt() / eps).ceil() as usize;

    let mut probes: Vec<Probe> = Vec::with_capacity(min_samples);
    let mut target = min_samples.max(16);
    loop {
        while probes.len() < target {
            let used = (oracle.counts() - before).total();
            if used + 4 > budget {
                return Err(EstimatorError::BudgetExceeded { queries: used, budget });
            }
            probes.push(probe(oracle, rng));
        }
        let raw = raw_estimate(&probes, &buckets, n, eps, params.min_large_hits);
        if raw.mean > 0.0 && z * raw.std_error <= raw.mean * eps / 3.0 {
            return Ok(finish(raw.mean, eps, oracle, before));
        }
        target *= 2;
    }
}

fn finish(raw_mean: f64, eps: f64, oracle: &QueryOracle<'_>, before: crate::oracle::QueryCounts) -> DegreeEstimate {
    DegreeEstimate {
        avg_degree: raw_mean / (1.0 + eps / 3.0),
        queries_used: (oracle.counts() - before).total(),
        mode: EstimatorMode::Sublinear,
    }
}

fn probe<R: Rng + ?Sized>(oracle: &mut QueryOracle<'_>, rng: &mut R) -> Probe {
    let v = oracle.uniform_vertex();
    let degree = oracle.degree(v).expect("vertex in range");
    let neighbor_degree = oracle
        .uniform_neighbor(v, degree, rng)
        .expect("vertex in range")
        .map(|(_, u)| oracle.degree(u).expect("vertex in range"));
    Probe {
        degree,
        neighbor_degree,
    }
}

struct RawEstimate {
    mean: f64,
    std_error: f64,
}

/// Per-sample contribution `X = d(v)·(1 + [neighbor lands in a sparse
/// bucket])` for `v` in a well-populated bucket, `0` otherwise.
/// `E[X]·n` is `m` minus the edges running between sparse buckets.
fn raw_estimate(probes: &[Probe], buckets: &Buckets, n: usize, eps: f64, min_hits: usize) -> RawEstimate {
    let k = probes.len();
    let nb = buckets.count(n);
    let mut hits = vec![0usize; nb];
    for p in probes {
        hits[buckets.of(p.degree)] += 1;
    }
    // Well populated: a sampled share of at least √(ε/n), and at least
    // `min_hits` samples. A handful of samples of a rare high-degree vertex
    // would otherwise make its bucket count as large and blow up the variance.
    let threshold = ((k as f64) * (eps / n as f64).sqrt()).max(min_hits.max(1) as f64);
    let large = |degree: usize| hits[buckets.of(degree)] as f64 >= threshold;

    let xs = probes.iter().map(|p| {
        if p.degree == 0 || !large(p.degree) {
            return 0.0;
        }
        let into_sparse = p.neighbor_degree.is_some_and(|d| !large(d));
        p.degree as f64 * if into_sparse { 2.0 } else { 1.0 }
    });
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for x in xs {
        sum += x;
        sum_sq += x * x;
    }
    let mean = sum / k as f64;
    let var = if k > 1 {
        ((sum_sq - k as f64 * mean * mean) / (k - 1) as f64).max(0.0)
    } else {
        f64::INFINITY
    };
    RawEstimate {
        mean,
        std_error: (var / k as f64).sqrt(),
    }
}

/// Chooses between the two modes.
pub fn estimate_avg_degree<R: Rng + ?Sized>(
    oracle: &mut QueryOracle<'_>,
    mode: EstimatorMode,
    eps: f64,
    delta: f64,
    rng: &mut R,
) -> Result<DegreeEstimate, EstimatorError> {
    match mode {
        EstimatorMode::Exact => estimate_avg_degree_exact(oracle),
        EstimatorMode::Sublinear => estimate_avg_degree_sublinear(oracle, eps, delta, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::GenSpec;
    use crate::graph::Graph;
    use crate::rng::{stream_rng, Stream};

    #[test]
    fn exact_clique() {
        let g = GenSpec::Clique { k: 5 }.generate(0).unwrap();
        let mut o = QueryOracle::new(&g, 0);
        let est = estimate_avg_degree_exact(&mut o).unwrap();
        assert_eq!(est.avg_degree, 4.0);
        assert_eq!(est.queries_used, 5);
        assert_eq!(o.counts().degree, 5);
        assert_eq!(est.mode, EstimatorMode::Exact);
    }

    #[test]
    fn exact_star_and_path() {
        let g = GenSpec::Star { n: 11 }.generate(0).unwrap();
        let est = estimate_avg_degree_exact(&mut QueryOracle::new(&g, 0)).unwrap();
        assert_eq!(est.avg_degree, 20.0 / 11.0);
        assert_eq!(est.queries_used, 11);
        let path = Graph::parse_edge_list("0 1\n1 2").unwrap();
        let est = estimate_avg_degree_exact(&mut QueryOracle::new(&path, 0)).unwrap();
        assert_eq!(est.avg_degree, 4.0 / 3.0);
    }

    #[test]
    fn no_edges() {
        let g = Graph::parse_edge_list("# n=50\n").unwrap();
        assert_eq!(
            estimate_avg_degree_exact(&mut QueryOracle::new(&g, 0)),
            Err(EstimatorError::NoEdges)
        );
        let mut rng = stream_rng(0, Stream::Estimator);
        let err = estimate_avg_degree_sublinear(&mut QueryOracle::new(&g, 0), 0.25, 0.1, &mut rng).unwrap_err();
        match err {
            EstimatorError::BudgetExceeded { queries, budget } => {
                assert_eq!(budget, 64 * 50);
                assert!(queries <= budget);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sublinear_regular_graph_is_exact_up_to_deflation() {
        let g = GenSpec::Clique { k: 64 }.generate(0).unwrap();
        let mut rng = stream_rng(5, Stream::Estimator);
        let est = estimate_avg_degree_sublinear(&mut QueryOracle::new(&g, 5), 0.25, 0.1, &mut rng).unwrap();
        assert!((est.avg_degree - 63.0 / (1.0 + 0.25 / 3.0)).abs() < 1e-12);
        assert!(est.is_good(63.0, 0.25));
    }

    #[test]
    fn sublinear_is_sublinear_on_dense_graphs() {
        let g = GenSpec::Clique { k: 4096 }.generate(0).unwrap();
        let mut rng = stream_rng(1, Stream::Estimator);
        let est = estimate_avg_degree_sublinear(&mut QueryOracle::new(&g, 1), 0.25, 0.1, &mut rng).unwrap();
        assert!(est.queries_used < 4096, "{} queries", est.queries_used);
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = GenSpec::Clique { k: 4 }.generate(0).unwrap();
        let mut rng = stream_rng(1, Stream::Estimator);
        let mut o = QueryOracle::new(&g, 0);
        assert!(estimate_avg_degree_sublinear(&mut o, 0.5, 0.1, &mut rng).is_err());
        assert!(estimate_avg_degree_sublinear(&mut o, 0.2, 1.0, &mut rng).is_err());
    }

    #[test]
    fn buckets_are_geometric() {
        let b = Buckets::new(1.0);
        assert_eq!(b.of(0), 0);
        assert_eq!(b.of(1), 1);
        assert_eq!(b.of(2), 2);
        assert_eq!(b.of(3), 3);
        assert_eq!(b.of(4), 3);
        assert_eq!(b.of(5), 4);
    }

    #[test]
    fn band() {
        assert!(in_good_band(9.0, 10.0, 0.1));
        assert!(in_good_band(10.0, 10.0, 0.1));
        assert!(!in_good_band(10.01, 10.0, 0.1));
        assert!(!in_good_band(8.9, 10.0, 0.1));
    }
}
