//! Experiment drivers and their report rows.
//!
//! Every number in a report is reproducible from the graph, the sampler
//! configuration and the seed. Reports carry no timestamps.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::distribution::{chi_square, max_binomial_z, pointwise_deviation, tvd, EdgeDistribution};
use super::goodset::check_good_set;
use crate::error::{HarnessError, SamplerError};
use crate::estimator::{in_good_band, EstimatorMode};
use crate::graph::Graph;
use crate::oracle::{QueryCounts, QueryOracle};
use crate::rng::{stream_rng, Stream};
use crate::sampler::{exact_distribution, preprocess, sample_edge, SamplerConfig, SamplerState};

/// Per-edge z-score bound for empirical-vs-exact agreement.
pub const EMPIRICAL_Z_BOUND: f64 = 4.0;
/// Minimum chi-square p-value for empirical-vs-exact agreement.
pub const CHI_SQUARE_P_MIN: f64 = 1e-3;
/// The empirical verdict is only given when every edge with positive mass
/// expects at least this many hits; below it the normal approximation
/// behind both tests is too rough to judge by.
pub const MIN_EXPECTED_HITS: f64 = 5.0;

/// Result of drawing `q` edges with [`sample_edge`].
#[derive(Debug, Clone)]
pub struct EmpiricalRun {
    pub distribution: EdgeDistribution,
    pub queries: QueryCounts,
    pub iterations: u64,
}

impl EmpiricalRun {
    pub fn mean_iterations(&self) -> f64 {
        self.iterations as f64 / self.samples() as f64
    }

    pub fn samples(&self) -> u64 {
        self.distribution.counts().map_or(0, |c| c.iter().sum())
    }
}

/// Draws `q` edges and tallies them per oriented edge.
pub fn empirical_distribution<R: Rng + ?Sized>(
    oracle: &mut QueryOracle<'_>,
    state: &SamplerState,
    rng: &mut R,
    q: u64,
) -> Result<EmpiricalRun, HarnessError> {
    if q == 0 {
        return Err(HarnessError::NoSamples);
    }
    let graph = oracle.graph();
    let before = oracle.counts();
    let mut counts = vec![0u64; graph.m()];
    let mut iterations = 0;
    for _ in 0..q {
        let s = sample_edge(oracle, state, rng)?;
        counts[graph.slot(s.edge.source, s.position)] += 1;
        iterations += s.iterations;
    }
    Ok(EmpiricalRun {
        distribution: EdgeDistribution::from_counts(counts)?,
        queries: oracle.counts() - before,
        iterations,
    })
}

/// Seed for the `attempt`-th preprocessing retry.
pub fn retry_seed(seed: u64, attempt: u32) -> u64 {
    seed.wrapping_add((attempt as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Runs preprocessing up to `retries + 1` times on one oracle, with a fresh
/// seed per attempt. Returns the last error if every attempt fails.
pub fn preprocess_with_retries(
    oracle: &mut QueryOracle<'_>,
    config: &SamplerConfig,
    retries: u32,
) -> Result<SamplerState, SamplerError> {
    let mut last = None;
    for attempt in 0..=retries {
        let attempt_config = config.with_seed(retry_seed(config.seed, attempt));
        match preprocess(oracle, &attempt_config) {
            Ok(state) => return Ok(state),
            Err(e @ SamplerError::NoSetAccepted { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// One row of an experiment report: one (graph, config, seed, q).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub graph: String,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub eps: f64,
    pub delta: f64,
    pub x: f64,
    pub estimator: EstimatorMode,
    pub preprocess_ok: bool,
    pub failure: Option<String>,
    pub x_bar: Option<f64>,
    pub tau: Option<f64>,
    pub gamma_bar: Option<f64>,
    pub avg_degree_estimate: Option<f64>,
    pub t: u32,
    pub s: Option<usize>,
    pub sets_drawn: Option<u32>,
    pub good_set: Option<bool>,
    pub estimate_good: Option<bool>,
    pub preprocess_queries: u64,
    pub samples: u64,
    pub sample_queries: u64,
    pub total_queries: u64,
    pub total_iterations: u64,
    pub mean_iterations: Option<f64>,
    pub iteration_bound: Option<f64>,
    pub pointwise_dev: Option<f64>,
    pub max_min_ratio: Option<f64>,
    pub tvd: Option<f64>,
    pub empirical_max_z: Option<f64>,
    pub chi_square_p: Option<f64>,
    /// `pointwise_dev ≤ 2ε`; only judged for good states.
    pub pass_pointwise: Option<bool>,
    /// Mean iterations `≤ 192·x̄/ε`.
    pub pass_iterations: Option<bool>,
    /// `sample_queries ≤ 3 · total_iterations`.
    pub pass_query_budget: Option<bool>,
    /// Per-edge `|z| < 4` and chi-square `p > 0.001` against the exact
    /// distribution; only judged for good states.
    pub pass_empirical: Option<bool>,
}

impl ReportRow {
    /// False when any judged criterion failed, or preprocessing failed.
    pub fn passed(&self) -> bool {
        self.preprocess_ok
            && [
                self.pass_pointwise,
                self.pass_iterations,
                self.pass_query_budget,
                self.pass_empirical,
            ]
            .iter()
            .all(|flag| flag.unwrap_or(true))
    }

    /// Good set and good estimate.
    pub fn is_good_state(&self) -> bool {
        self.good_set == Some(true) && self.estimate_good == Some(true)
    }
}

/// What [`run_trial`] should measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialPlan {
    pub samples: u64,
    pub retries: u32,
    /// Compute the exact distribution and compare against it.
    pub exact: bool,
}

/// Preprocess, optionally compare the exact distribution to uniform, then
/// draw `plan.samples` edges. Exact quantities read the graph directly; all
/// query counts come from the oracle.
pub fn run_trial(graph: &Graph, label: &str, config: &SamplerConfig, plan: &TrialPlan) -> ReportRow {
    let mut oracle = QueryOracle::new(graph, config.seed);
    let mut row = ReportRow {
        graph: label.to_string(),
        n: graph.n(),
        m: graph.m(),
        seed: config.seed,
        eps: config.eps,
        delta: config.delta,
        x: config.x,
        estimator: config.estimator,
        preprocess_ok: false,
        failure: None,
        x_bar: None,
        tau: None,
        gamma_bar: None,
        avg_degree_estimate: None,
        t: config.repetitions(),
        s: None,
        sets_drawn: None,
        good_set: None,
        estimate_good: None,
        preprocess_queries: 0,
        samples: 0,
        sample_queries: 0,
        total_queries: 0,
        total_iterations: 0,
        mean_iterations: None,
        iteration_bound: None,
        pointwise_dev: None,
        max_min_ratio: None,
        tvd: None,
        empirical_max_z: None,
        chi_square_p: None,
        pass_pointwise: None,
        pass_iterations: None,
        pass_query_budget: None,
        pass_empirical: None,
    };

    let state = match preprocess_with_retries(&mut oracle, config, plan.retries) {
        Ok(state) => state,
        Err(e) => {
            row.failure = Some(e.to_string());
            row.preprocess_queries = oracle.counts().total();
            row.total_queries = row.preprocess_queries;
            return row;
        }
    };
    row.preprocess_ok = true;
    row.preprocess_queries = oracle.counts().total();
    row.x_bar = Some(state.x_bar());
    row.tau = Some(state.tau());
    row.gamma_bar = Some(state.gamma_bar());
    row.avg_degree_estimate = Some(state.avg_degree_estimate());
    row.s = Some(state.sample_size());
    row.sets_drawn = Some(state.sets_drawn());
    row.iteration_bound = Some(state.iteration_bound());

    let eps = config.eps;
    let good = check_good_set(graph, state.sample(), eps, state.tau());
    row.good_set = Some(good.is_good());
    row.estimate_good = Some(in_good_band(state.avg_degree_estimate(), graph.avg_degree(), eps));
    let good_state = row.is_good_state();

    let exact = plan.exact.then(|| exact_distribution(graph, &state));
    if let Some(exact) = &exact {
        let uniform = EdgeDistribution::uniform(graph);
        let dev = pointwise_deviation(exact, &uniform).expect("uniform has full support");
        row.pointwise_dev = Some(dev);
        row.max_min_ratio = Some(super::distribution::max_min_ratio(exact));
        row.tvd = Some(tvd(exact, &uniform).expect("same universe"));
        if good_state {
            row.pass_pointwise = Some(dev <= 2.0 * eps);
        }
    }

    if plan.samples > 0 {
        let mut rng = stream_rng(config.seed, Stream::Sampling);
        match empirical_distribution(&mut oracle, &state, &mut rng, plan.samples) {
            Ok(run) => {
                row.samples = run.samples();
                row.sample_queries = run.queries.total();
                row.total_iterations = run.iterations;
                let mean = run.mean_iterations();
                row.mean_iterations = Some(mean);
                row.pass_iterations = Some(mean <= state.iteration_bound());
                row.pass_query_budget = Some(row.sample_queries <= 3 * run.iterations);
                if let Some(exact) = &exact {
                    let counts = run.distribution.counts().expect("empirical");
                    let z = max_binomial_z(counts, exact.masses());
                    let chi = chi_square(counts, exact.masses()).expect("same universe");
                    row.empirical_max_z = Some(z);
                    row.chi_square_p = Some(chi.p_value);
                    let min_expected = exact
                        .masses()
                        .iter()
                        .filter(|&&p| p > 0.0)
                        .fold(f64::INFINITY, |a, &p| a.min(p))
                        * run.samples() as f64;
                    if good_state && min_expected >= MIN_EXPECTED_HITS {
                        row.pass_empirical = Some(z < EMPIRICAL_Z_BOUND && chi.p_value > CHI_SQUARE_P_MIN);
                    }
                }
            }
            Err(e) => {
                row.failure = Some(e.to_string());
                row.pass_iterations = Some(false);
            }
        }
    }
    row.total_queries = oracle.counts().total();
    row
}

/// Runs [`run_trial`] for every seed, in parallel, in seed order.
pub fn run_trials(graph: &Graph, label: &str, config: &SamplerConfig, plan: &TrialPlan, seeds: &[u64]) -> Vec<ReportRow> {
    seeds
        .par_iter()
        .map(|&seed| run_trial(graph, label, &config.with_seed(seed), plan))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub graph: String,
    pub runs: usize,
    pub preprocess_failures: usize,
    pub good_states: usize,
    pub worst_pointwise_dev_good: Option<f64>,
    pub max_mean_iterations: Option<f64>,
    pub mean_tvd: Option<f64>,
    pub passed: bool,
}

pub fn summarize(label: &str, rows: &[ReportRow]) -> VerifySummary {
    let good: Vec<&ReportRow> = rows.iter().filter(|r| r.is_good_state()).collect();
    let max = |xs: &mut dyn Iterator<Item = f64>| xs.fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))));
    let tvds: Vec<f64> = rows.iter().filter_map(|r| r.tvd).collect();
    VerifySummary {
        graph: label.to_string(),
        runs: rows.len(),
        preprocess_failures: rows.iter().filter(|r| !r.preprocess_ok).count(),
        good_states: good.len(),
        worst_pointwise_dev_good: max(&mut good.iter().filter_map(|r| r.pointwise_dev)),
        max_mean_iterations: max(&mut rows.iter().filter_map(|r| r.mean_iterations)),
        mean_tvd: (!tvds.is_empty()).then(|| tvds.iter().sum::<f64>() / tvds.len() as f64),
        passed: rows.iter().all(ReportRow::passed),
    }
}

/// Settings for [`scaling_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingConfig {
    pub eps: f64,
    pub delta: f64,
    pub q_grid: Vec<u64>,
    pub seeds: Vec<u64>,
    pub estimator: EstimatorMode,
    /// Use this `x` for every `q` instead of `(n/√m)/√q`.
    pub fixed_x: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingPoint {
    pub q: u64,
    pub x: f64,
    pub median_total_queries: f64,
    pub median_preprocess_queries: f64,
    pub median_sample_queries: f64,
    /// Sampling queries per sample, median over seeds.
    pub median_queries_per_sample: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub graph: String,
    pub points: Vec<ScalingPoint>,
    /// `median_total(q_{i+1}) / median_total(q_i)`.
    pub step_ratios: Vec<f64>,
    /// Least-squares fit `median_total ≈ slope·√q + intercept`.
    pub sqrt_fit_slope: f64,
    pub sqrt_fit_intercept: f64,
    pub sqrt_fit_correlation: f64,
    /// Queries above `n²/m`, where the trade-off clamps at `x = 1`.
    pub q_above_dense_limit: Vec<u64>,
    #[serde(skip)]
    pub rows: Vec<ReportRow>,
}

/// `x = (n/√m)/√q`, clamped to at least 1.
pub fn amortized_tradeoff(n: usize, m: usize, q: u64) -> f64 {
    ((n as f64 / (m as f64).sqrt()) / (q as f64).sqrt()).max(1.0)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

/// For every `q` in the grid and every seed: set the trade-off for `q`, run
/// preprocessing plus `q` samples, and record total queries. Then fit the
/// per-`q` median totals against `√q`.
pub fn scaling_experiment(graph: &Graph, label: &str, config: &ScalingConfig) -> ScalingReport {
    let jobs: Vec<(u64, u64)> = config
        .q_grid
        .iter()
        .flat_map(|&q| config.seeds.iter().map(move |&seed| (q, seed)))
        .collect();
    let rows: Vec<ReportRow> = jobs
        .par_iter()
        .map(|&(q, seed)| {
            let x = config
                .fixed_x
                .unwrap_or_else(|| amortized_tradeoff(graph.n(), graph.m(), q));
            let sampler = SamplerConfig::new(config.eps, config.delta, x, seed).with_estimator(config.estimator);
            let plan = TrialPlan {
                samples: q,
                retries: 0,
                exact: false,
            };
            run_trial(graph, label, &sampler, &plan)
        })
        .collect();

    let mut points = Vec::new();
    for &q in &config.q_grid {
        let of_q: Vec<&ReportRow> = rows.iter().filter(|r| r.samples == q || (r.samples == 0 && !r.preprocess_ok)).collect();
        let of_q: Vec<&ReportRow> = of_q.into_iter().filter(|r| r.preprocess_ok && r.samples == q).collect();
        let pick = |f: &dyn Fn(&ReportRow) -> f64| {
            let mut v: Vec<f64> = of_q.iter().map(|r| f(r)).collect();
            if v.is_empty() { f64::NAN } else { median(&mut v) }
        };
        points.push(ScalingPoint {
            q,
            x: config
                .fixed_x
                .unwrap_or_else(|| amortized_tradeoff(graph.n(), graph.m(), q)),
            median_total_queries: pick(&|r| r.total_queries as f64),
            median_preprocess_queries: pick(&|r| r.preprocess_queries as f64),
            median_sample_queries: pick(&|r| r.sample_queries as f64),
            median_queries_per_sample: pick(&|r| r.sample_queries as f64 / q as f64),
        });
    }

    let step_ratios = points
        .windows(2)
        .map(|w| w[1].median_total_queries / w[0].median_total_queries)
        .collect();
    let xs: Vec<f64> = points.iter().map(|p| (p.q as f64).sqrt()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.median_total_queries).collect();
    let (slope, intercept, correlation) = linear_fit(&xs, &ys);
    let dense_limit = graph.n() as f64 * graph.n() as f64 / graph.m() as f64;

    ScalingReport {
        graph: label.to_string(),
        points,
        step_ratios,
        sqrt_fit_slope: slope,
        sqrt_fit_intercept: intercept,
        sqrt_fit_correlation: correlation,
        q_above_dense_limit: config.q_grid.iter().copied().filter(|&q| q as f64 > dense_limit).collect(),
        rows,
    }
}

/// Ordinary least squares; returns `(slope, intercept, pearson r)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx, sxy / (sxx * syy).sqrt())
}

/// Writes rows as CSV with a header line.
pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<(), HarnessError> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row).map_err(|e| HarnessError::Output(e.to_string()))?;
    }
    writer.flush().map_err(|e| HarnessError::Output(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::GenSpec;

    #[test]
    fn empirical_needs_positive_q() {
        let g = GenSpec::Ring { n: 30, half_degree: 2 }.generate(0).unwrap();
        let mut o = QueryOracle::new(&g, 0);
        let state = preprocess(&mut o, &SamplerConfig::new(0.25, 0.1, 1.0, 0)).unwrap();
        let mut rng = stream_rng(0, Stream::Sampling);
        assert!(matches!(
            empirical_distribution(&mut o, &state, &mut rng, 0),
            Err(HarnessError::NoSamples)
        ));
    }

    #[test]
    fn counter_conservation() {
        let g = GenSpec::Lollipop { k: 8, path_len: 30 }.generate(0).unwrap();
        let config = SamplerConfig::new(0.25, 0.1, 2.0, 3);
        let plan = TrialPlan { samples: 500, retries: 0, exact: true };
        let row = run_trial(&g, "lollipop:8,30", &config, &plan);
        assert!(row.preprocess_ok);
        assert_eq!(row.total_queries, row.preprocess_queries + row.sample_queries);
        assert_eq!(row.samples, 500);
        assert!(row.sample_queries <= 3 * row.total_iterations);
        assert!(row.passed(), "{row:?}");
    }

    #[test]
    fn rows_are_reproducible() {
        let g = GenSpec::Star { n: 31 }.generate(0).unwrap();
        let config = SamplerConfig::new(0.3, 0.2, 1.0, 0);
        let plan = TrialPlan { samples: 200, retries: 1, exact: true };
        let a = run_trials(&g, "star:31", &config, &plan, &[1, 2, 3]);
        let b = run_trials(&g, "star:31", &config, &plan, &[1, 2, 3]);
        assert_eq!(a, b);
        let mut csv_a = Vec::new();
        write_csv(&a, &mut csv_a).unwrap();
        let text = String::from_utf8(csv_a).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("graph,n,m,seed,eps,delta,x,"));
    }

    #[test]
    fn tradeoff_clamp() {
        // n/√m = 10
        assert_eq!(amortized_tradeoff(100, 100, 4), 5.0);
        assert_eq!(amortized_tradeoff(100, 100, 100), 1.0);
        assert_eq!(amortized_tradeoff(100, 100, 400), 1.0);
    }

    #[test]
    fn retry_seeds_differ() {
        assert_eq!(retry_seed(5, 0), 5);
        assert_ne!(retry_seed(5, 1), retry_seed(5, 2));
    }

    #[test]
    fn fit_recovers_a_line() {
        let (slope, intercept, r) = linear_fit(&[1.0, 2.0, 3.0], &[5.0, 7.0, 9.0]);
        assert!((slope - 2.0).abs() < 1e-12);
        assert!((intercept - 3.0).abs() < 1e-12);
        assert!((r - 1.0).abs() < 1e-12);
    }
}
