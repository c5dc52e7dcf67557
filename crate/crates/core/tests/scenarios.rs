use subedge::harness::{
    empirical_distribution, max_binomial_z, pointwise_deviation, run_trial, scaling_experiment, EdgeDistribution,
    ScalingConfig, TrialPlan,
};
use subedge::rng::{stream_rng, Stream};
use subedge::{preprocess, EstimatorMode, GenSpec, QueryOracle, SamplerConfig};

#[test]
fn regular_graph_samples_look_uniform() {
    let g = GenSpec::Ring { n: 100, half_degree: 2 }.generate(0).unwrap();
    let mut oracle = QueryOracle::new(&g, 11);
    let state = preprocess(&mut oracle, &SamplerConfig::new(0.25, 0.1, 1.0, 11)).unwrap();
    let uniform = EdgeDistribution::uniform(&g);
    let mut rng = stream_rng(11, Stream::Sampling);
    let run = empirical_distribution(&mut oracle, &state, &mut rng, 1_000_000).unwrap();
    let z = max_binomial_z(run.distribution.counts().unwrap(), uniform.masses());
    assert!(z < 4.0, "max |z| = {z}");
}

#[test]
fn exact_mode_regular_graph_has_no_deviation() {
    let g = GenSpec::Ring { n: 64, half_degree: 3 }.generate(0).unwrap();
    let row = run_trial(
        &g,
        "ring:64,3",
        &SamplerConfig::new(0.1, 0.1, 2.0, 0),
        &TrialPlan { samples: 0, retries: 0, exact: true },
    );
    assert!(row.pointwise_dev.unwrap() < 1e-9);
    assert!(row.tvd.unwrap() < 1e-9);
}

#[test]
fn trade_off_moves_cost_between_phases() {
    let g = GenSpec::ErdosRenyi { n: 1000, p: 0.02 }.generate(3).unwrap();
    let plan = TrialPlan { samples: 2000, retries: 1, exact: false };
    let cheap_samples = run_trial(&g, "er", &SamplerConfig::new(0.25, 0.1, 1.0, 4), &plan);
    let cheap_setup = run_trial(&g, "er", &SamplerConfig::new(0.25, 0.1, 4.0, 4), &plan);
    assert!(cheap_setup.preprocess_queries < cheap_samples.preprocess_queries);
    assert!(cheap_setup.sample_queries > cheap_samples.sample_queries);
}

/// With x = n/√m the per-sample cost is about x times that at x = 1.
#[test]
fn fixed_tradeoff_per_sample_cost() {
    let g = GenSpec::ErdosRenyi { n: 2000, p: 0.01 }.generate(1).unwrap();
    let x = g.n() as f64 / (g.m() as f64).sqrt();
    let per_sample = |fixed_x: f64| {
        let config = ScalingConfig {
            eps: 0.25,
            delta: 0.1,
            q_grid: vec![4000],
            seeds: (0..5).collect(),
            estimator: EstimatorMode::Sublinear,
            fixed_x: Some(fixed_x),
        };
        scaling_experiment(&g, "er", &config).points[0].median_queries_per_sample
    };
    let (at_one, at_x) = (per_sample(1.0), per_sample(x));
    let ratio = at_x / at_one;
    assert!((0.7 * x..=1.3 * x).contains(&ratio), "x = {x:.2}, cost ratio {ratio:.2}");
}

#[test]
fn heavy_hub_star_is_close_but_not_exact() {
    // A star where the hub is heavy: masses differ only through d_S(hub).
    let g = GenSpec::Star { n: 101 }.generate(0).unwrap();
    let row = run_trial(
        &g,
        "star:101",
        &SamplerConfig::new(0.1, 0.1, 1.0, 2),
        &TrialPlan { samples: 0, retries: 0, exact: true },
    );
    assert!(row.is_good_state());
    let dev = row.pointwise_dev.unwrap();
    assert!(dev > 0.0 && dev <= 0.2, "{dev}");
    let uniform = EdgeDistribution::uniform(&g);
    assert_eq!(pointwise_deviation(&uniform, &uniform).unwrap(), 0.0);
}
