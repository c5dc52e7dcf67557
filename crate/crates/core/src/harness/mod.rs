//! Verification harness. Unlike the sampler, the harness may read the whole
//! graph, so it can compute exact distributions and check the sampled set.

mod distribution;
mod experiment;
mod goodset;

pub use distribution::{
    chi_square, max_binomial_z, max_min_ratio, pointwise_deviation, tvd, ChiSquareTest, DistributionKind,
    EdgeDistribution,
};
pub use experiment::{
    amortized_tradeoff, empirical_distribution, linear_fit, preprocess_with_retries, retry_seed, run_trial,
    run_trials, scaling_experiment, summarize, write_csv, EmpiricalRun, ReportRow, ScalingConfig, ScalingPoint,
    ScalingReport, TrialPlan, VerifySummary, CHI_SQUARE_P_MIN, EMPIRICAL_Z_BOUND, MIN_EXPECTED_HITS,
};
pub use goodset::{check_good_set, GoodSetReport};
