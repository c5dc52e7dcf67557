use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use subedge::harness::{
    run_trials, scaling_experiment, summarize, write_csv, ReportRow, ScalingConfig, TrialPlan,
};
use subedge::rng::{stream_rng, Stream};
use subedge::sampler::{iteration_cap, StateDocument};
use subedge::{
    sample_edge, EstimatorMode, GenSpec, Graph, QueryOracle, SamplerConfig, SamplerError, SamplerState,
};

#[derive(Parser)]
#[command(name = "subedge", version, about = "Near-uniform edge sampling with sublinear query access")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it as an edge list.
    Gen(GenArgs),
    /// Run preprocessing and write the sampler state as JSON.
    Preprocess(PreprocessArgs),
    /// Draw edges, from a saved state or after preprocessing inline.
    Sample(SampleArgs),
    /// Preprocess and sample over many seeds and check the guarantees.
    Verify(VerifyArgs),
    /// Measure total queries against the number of samples.
    Scale(ScaleArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Generator spec, e.g. star:11, lollipop:10,50, er:1000,0.01.
    #[arg(long, value_name = "SPEC", group = "family")]
    gen: Option<GenSpec>,
    #[arg(long, value_name = "N", group = "family")]
    star: Option<usize>,
    #[arg(long, value_name = "K", group = "family")]
    clique: Option<usize>,
    #[arg(long, value_name = "K,PATH_LEN", group = "family")]
    lollipop: Option<String>,
    #[arg(long, value_name = "N,P", group = "family")]
    erdos_renyi: Option<String>,
    #[arg(long, value_name = "CLIQUE,LEFT,RIGHT", group = "family")]
    clique_bipartite: Option<String>,
    #[command(flatten)]
    seed: SeedArg,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SeedArg {
    #[arg(long, env = "SUBEDGE_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct GraphSource {
    /// Edge-list file.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Generator spec, built with --seed.
    #[arg(long, value_name = "SPEC")]
    gen: Option<GenSpec>,
}

#[derive(Args)]
struct SamplerArgs {
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Trade-off parameter; larger is cheaper to preprocess and dearer per sample.
    #[arg(long, default_value_t = 1.0)]
    x: f64,
    #[arg(long, value_enum, default_value_t = Estimator::Exact)]
    estimator: Estimator,
    /// Extra preprocessing attempts with fresh seeds.
    #[arg(long, default_value_t = 0)]
    retries: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Estimator {
    Exact,
    Sublinear,
}

impl From<Estimator> for EstimatorMode {
    fn from(e: Estimator) -> Self {
        match e {
            Estimator::Exact => EstimatorMode::Exact,
            Estimator::Sublinear => EstimatorMode::Sublinear,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct PreprocessArgs {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[command(flatten)]
    seed: SeedArg,
    /// State file; the state goes to stdout and the report to stderr if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    source: GraphSource,
    /// State written by `preprocess`. Without it, preprocessing runs first.
    #[arg(long)]
    state: Option<PathBuf>,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[arg(long, default_value_t = 1)]
    q: u64,
    /// Print each edge as `u v` with `u <= v`.
    #[arg(long)]
    fold: bool,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    sampler: SamplerArgs,
    /// Samples per seed.
    #[arg(long, default_value_t = 100_000)]
    q: u64,
    /// Number of seeds, starting at --seed.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScaleArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, value_enum, default_value_t = Estimator::Sublinear)]
    estimator: Estimator,
    /// Comma-separated sample counts.
    #[arg(long, value_delimiter = ',', default_value = "100,400,1600,6400")]
    q: Vec<u64>,
    /// Use this x at every q instead of (n/sqrt(m))/sqrt(q).
    #[arg(long)]
    x: Option<f64>,
    #[arg(long, default_value_t = 9)]
    seeds: u64,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit 1: the algorithm or a checked guarantee failed. Exit 2: bad input or I/O.
enum Failure {
    Algorithm(anyhow::Error),
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn algorithmic(e: SamplerError) -> Failure {
    match e {
        SamplerError::InvalidConfig(_) | SamplerError::InvalidState(_) | SamplerError::GraphMismatch(_) => {
            Failure::Usage(e.into())
        }
        other => Failure::Algorithm(other.into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Preprocess(args) => cmd_preprocess(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Scale(args) => cmd_scale(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Algorithm(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn load_graph(source: &GraphSource, seed: u64) -> anyhow::Result<(Graph, String)> {
    match (&source.graph, &source.gen) {
        (Some(path), _) => Ok((Graph::load(path)?, path.display().to_string())),
        (None, Some(spec)) => Ok((spec.generate(seed)?, spec.to_string())),
        (None, None) => bail!("one of --graph or --gen is required"),
    }
}

fn sampler_config(args: &SamplerArgs, seed: u64) -> Result<SamplerConfig, Failure> {
    let config = SamplerConfig::new(args.eps, args.delta, args.x, seed).with_estimator(args.estimator.into());
    config.validate().map_err(algorithmic)?;
    Ok(config)
}

fn parse_spec(text: &str) -> anyhow::Result<GenSpec> {
    Ok(text.parse::<GenSpec>()?)
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    let spec = if let Some(spec) = args.gen {
        spec
    } else if let Some(n) = args.star {
        GenSpec::Star { n }
    } else if let Some(k) = args.clique {
        GenSpec::Clique { k }
    } else if let Some(a) = &args.lollipop {
        parse_spec(&format!("lollipop:{a}"))?
    } else if let Some(a) = &args.erdos_renyi {
        parse_spec(&format!("erdos_renyi:{a}"))?
    } else if let Some(a) = &args.clique_bipartite {
        parse_spec(&format!("clique_plus_bipartite:{a}"))?
    } else {
        return Err(anyhow::anyhow!("choose a family: --gen, --star, --clique, --lollipop, --erdos-renyi or --clique-bipartite").into());
    };
    let graph = spec.generate(args.seed.seed).map_err(anyhow::Error::from)?;
    emit(args.out.as_deref(), &graph.to_edge_list())?;
    Ok(())
}

fn cmd_preprocess(args: PreprocessArgs) -> Result<(), Failure> {
    let seed = args.seed.seed;
    let (graph, _) = load_graph(&args.source, seed)?;
    let config = sampler_config(&args.sampler, seed)?;
    let mut oracle = QueryOracle::new(&graph, seed);
    let state = subedge::harness::preprocess_with_retries(&mut oracle, &config, args.sampler.retries)
        .map_err(algorithmic)?;
    let counts = oracle.counts();
    let report = json!({
        "state": state.summary(),
        "queries": {
            "uniform_vertex": counts.uniform_vertex,
            "degree": counts.degree,
            "neighbor": counts.neighbor,
            "total": counts.total(),
        },
    });
    let state_json = state.to_json(Some(graph.fingerprint()));
    let report = serde_json::to_string_pretty(&report).expect("report serializes");
    match &args.out {
        Some(path) => {
            emit(Some(path), &state_json)?;
            println!("{report}");
        }
        None => {
            println!("{state_json}");
            eprintln!("{report}");
        }
    }
    Ok(())
}

fn cmd_sample(args: SampleArgs) -> Result<(), Failure> {
    let seed = args.seed.seed;
    let (graph, _) = load_graph(&args.source, seed)?;
    let (state, mut oracle) = match &args.state {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let doc: StateDocument = serde_json::from_str(&text).context("parsing state file")?;
            doc.check_graph(&graph).map_err(algorithmic)?;
            let state = SamplerState::from_document(&doc).map_err(algorithmic)?;
            (state, QueryOracle::resumed(&graph, seed))
        }
        None => {
            let config = sampler_config(&args.sampler, seed)?;
            let mut oracle = QueryOracle::new(&graph, seed);
            let state = subedge::harness::preprocess_with_retries(&mut oracle, &config, args.sampler.retries)
                .map_err(algorithmic)?;
            (state, oracle)
        }
    };

    let before = oracle.counts();
    let mut rng = stream_rng(seed, Stream::Sampling);
    let mut text = String::new();
    let mut iterations = 0u64;
    for _ in 0..args.q {
        let drawn = sample_edge(&mut oracle, &state, &mut rng).map_err(algorithmic)?;
        iterations += drawn.iterations;
        let (u, v) = if args.fold {
            drawn.edge.folded()
        } else {
            (drawn.edge.source, drawn.edge.target)
        };
        text.push_str(&format!("{u} {v}\n"));
    }
    let spent = oracle.counts() - before;
    let summary = json!({
        "samples": args.q,
        "total_iterations": iterations,
        "iteration_cap": iteration_cap(&state),
        "preprocess_queries": before.total(),
        "sample_queries": spent.total(),
        "queries": {
            "uniform_vertex": spent.uniform_vertex,
            "degree": spent.degree,
            "neighbor": spent.neighbor,
        },
    });
    text.push_str(&serde_json::to_string(&summary).expect("summary serializes"));
    text.push('\n');
    emit(args.out.as_deref(), &text)?;
    Ok(())
}

fn write_rows(rows: &[ReportRow], format: Format, json_doc: serde_json::Value, out: Option<&Path>) -> anyhow::Result<()> {
    let text = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(rows, &mut buf)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
        Format::Json => serde_json::to_string_pretty(&json_doc).expect("report serializes") + "\n",
    };
    emit(out, &text)
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let seed = args.seed.seed;
    let (graph, label) = load_graph(&args.source, seed)?;
    let config = sampler_config(&args.sampler, seed)?;
    let plan = TrialPlan {
        samples: args.q,
        retries: args.sampler.retries,
        exact: true,
    };
    let seeds: Vec<u64> = (0..args.seeds).map(|i| seed.wrapping_add(i)).collect();
    let rows = run_trials(&graph, &label, &config, &plan, &seeds);
    let summary = summarize(&label, &rows);
    let doc = json!({ "summary": summary, "rows": rows });
    write_rows(&rows, args.format, doc, args.out.as_deref())?;
    if !summary.passed {
        let failed: Vec<u64> = rows.iter().filter(|r| !r.passed()).map(|r| r.seed).collect();
        return Err(Failure::Algorithm(anyhow::anyhow!("checks failed for seeds {failed:?}")));
    }
    Ok(())
}

fn cmd_scale(args: ScaleArgs) -> Result<(), Failure> {
    let seed = args.seed.seed;
    let (graph, label) = load_graph(&args.source, seed)?;
    if args.q.is_empty() || args.q.contains(&0) {
        return Err(anyhow::anyhow!("--q needs positive sample counts").into());
    }
    let config = ScalingConfig {
        eps: args.eps,
        delta: args.delta,
        q_grid: args.q.clone(),
        seeds: (0..args.seeds).map(|i| seed.wrapping_add(i)).collect(),
        estimator: args.estimator.into(),
        fixed_x: args.x,
    };
    SamplerConfig::new(args.eps, args.delta, args.x.unwrap_or(1.0), seed)
        .validate()
        .map_err(algorithmic)?;
    let report = scaling_experiment(&graph, &label, &config);
    let doc = json!({ "report": report, "rows": report.rows });
    write_rows(&report.rows, args.format, doc, args.out.as_deref())?;

    let failed_runs = report.rows.iter().filter(|r| !r.preprocess_ok).count();
    if failed_runs > 0 {
        return Err(Failure::Algorithm(anyhow::anyhow!("{failed_runs} runs failed preprocessing")));
    }
    for (i, ratio) in report.step_ratios.iter().enumerate() {
        let step = report.points[i + 1].q as f64 / report.points[i].q as f64;
        // Growth like sqrt(q): a 4x step should cost about 2x.
        let (lo, hi) = (step.sqrt() * 0.75, step.sqrt() * 1.4);
        if !(lo..=hi).contains(ratio) {
            return Err(Failure::Algorithm(anyhow::anyhow!(
                "total queries grew {ratio:.3}x from q={} to q={}, outside [{lo:.2}, {hi:.2}]",
                report.points[i].q,
                report.points[i + 1].q
            )));
        }
    }
    Ok(())
}
