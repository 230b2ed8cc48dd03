use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use csbm::harness::{
    estimate_params_pooled, load_graph, load_pair, run_experiment, save_graph, write_csv,
    ExperimentConfig, ExperimentInput,
};
use csbm::matcher::{
    full_pipeline, ParamSource, PipelineConfig, Refinement, SeedMode, Stage1Route,
};
use csbm::sbm::{generate_correlated_pair, PairOptions, PermutationMode, SbmParams};
use csbm::signature::{CommunitySelection, DegreeTransform, ParentRule};
use csbm::{Error, Execution};

#[derive(Parser)]
#[command(
    name = "csbm",
    version,
    about = "Exact matching of correlated SBM graph pairs"
)]
struct Cli {
    /// More log output (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a correlated SBM pair and write it as edge and label files.
    Generate(GenerateArgs),
    /// Match two graphs that share vertex ids and report per-stage accuracy.
    Match(MatchArgs),
    /// Run a grid of experiments and write one CSV row per stage.
    Sweep(SweepArgs),
    /// Print per-community degree statistics.
    Estimate(EstimateArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    p: f64,
    /// Defaults to p/3.
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = PermutationArg::Within)]
    permutation: PermutationArg,
    /// Output directory; receives g1.edges, g1.labels, g2.edges, g2.labels.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum PermutationArg {
    Within,
    Uniform,
    Identity,
}

#[derive(Args)]
struct MatchArgs {
    /// Edge file of the first graph.
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    edges2: PathBuf,
    #[arg(long)]
    labels2: PathBuf,
    /// Known child intra density; estimated from degrees when absent.
    #[arg(long, requires = "q")]
    p: Option<f64>,
    /// Known inter-community density; goes with --p.
    #[arg(long, requires = "p")]
    q: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the matching as `id_in_graph2 id_in_graph1` lines.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Synthetic,
    RealPair,
    RealResample,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Synthetic)]
    mode: ModeArg,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated child intra densities (synthetic mode).
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    /// q as a fraction of p.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    q_ratio: f64,
    /// Comma-separated edge deletion probabilities.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    alpha: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    /// Master seed; every row records the derived seed of its run.
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    edges2: Option<PathBuf>,
    #[arg(long)]
    labels2: Option<PathBuf>,
    /// Match synthetic pairs with degree estimates instead of the true p, q.
    #[arg(long)]
    estimated: bool,
    /// Fill the seconds column (makes the CSV differ between runs).
    #[arg(long)]
    timings: bool,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    labels: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    /// Thresholded signature matching and two-hop seeding.
    Theory,
    /// Similarity-matrix assignment, k'=4, l=2, greedy seeding, refinement everywhere.
    Experiment,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Threshold,
    Assignment,
}

#[derive(Clone, Copy, ValueEnum)]
enum RefineArg {
    None,
    Threshold,
    Assignment,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeedingArg {
    Theory,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParentArg {
    /// The reaching node with the smallest code.
    Code,
    /// The node of the smallest-id predecessor.
    Id,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long, value_enum, default_value_t = PresetArg::Theory)]
    preset: PresetArg,
    /// Sign communities per tree level.
    #[arg(long)]
    kprime: Option<usize>,
    /// Tree depth.
    #[arg(long)]
    ell: Option<usize>,
    /// Half size of the sampled leaf-index set.
    #[arg(long)]
    w: Option<usize>,
    /// Distance threshold is |J| (1 - slack).
    #[arg(long)]
    slack: Option<f64>,
    /// How the smallest community is matched from signatures.
    #[arg(long, value_enum)]
    route: Option<RouteArg>,
    /// Refinement of the smallest-community matching.
    #[arg(long, value_enum)]
    refine: Option<RefineArg>,
    /// Maximum assignment-refinement rounds.
    #[arg(long)]
    rounds: Option<usize>,
    /// Witness threshold of thresholded refinement is epsilon^2 p n / 512.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum)]
    seeding: Option<SeedingArg>,
    /// Also refine every seeded community.
    #[arg(long)]
    refine_seeded: bool,
    /// Seed for random sign-community selection (default: largest communities).
    #[arg(long)]
    random_selection: Option<u64>,
    /// Which node a vertex reached from several nodes joins.
    #[arg(long, value_enum)]
    parent_rule: Option<ParentArg>,
    /// Use ln(1 + degree) in signatures (default on for real data).
    #[arg(long, overrides_with = "no_log_degree")]
    log_degree: bool,
    #[arg(long)]
    no_log_degree: bool,
    /// Run every kernel on the calling thread.
    #[arg(long)]
    sequential: bool,
}

impl PipelineArgs {
    fn build(&self, params: ParamSource, seed: u64, real_data: bool) -> PipelineConfig {
        let mut cfg = match self.preset {
            PresetArg::Theory => PipelineConfig::new(params, seed),
            PresetArg::Experiment => PipelineConfig::experiment(params, seed),
        };
        cfg.kprime = self.kprime.or(cfg.kprime);
        cfg.ell = self.ell.or(cfg.ell);
        cfg.w = self.w;
        cfg.threshold_slack = self.slack;
        if let Some(r) = self.route {
            cfg.stage1 = match r {
                RouteArg::Threshold => Stage1Route::Threshold,
                RouteArg::Assignment => Stage1Route::Assignment,
            };
        }
        if let Some(r) = self.refine {
            cfg.refinement = match r {
                RefineArg::None => Refinement::None,
                RefineArg::Threshold => Refinement::Threshold,
                RefineArg::Assignment => Refinement::Assignment,
            };
        }
        if let Some(r) = self.rounds {
            cfg.refine_rounds = r;
        }
        if let Some(e) = self.epsilon {
            cfg.epsilon_refine = e;
        }
        if let Some(s) = self.seeding {
            cfg.seed_mode = match s {
                SeedingArg::Theory => SeedMode::Theory,
                SeedingArg::Greedy => SeedMode::Greedy,
            };
        }
        cfg.refine_seeded |= self.refine_seeded;
        if let Some(s) = self.random_selection {
            cfg.selection = CommunitySelection::Random(s);
        }
        if let Some(p) = self.parent_rule {
            cfg.parent_rule = match p {
                ParentArg::Code => ParentRule::SmallestCode,
                ParentArg::Id => ParentRule::SmallestId,
            };
        }
        let log = if self.no_log_degree {
            false
        } else {
            self.log_degree || real_data
        };
        cfg.transform = if log {
            DegreeTransform::Log
        } else {
            DegreeTransform::Raw
        };
        if self.sequential {
            cfg.exec = Execution::Sequential;
        }
        cfg
    }
}

fn generate(args: &GenerateArgs) -> csbm::Result<()> {
    let q = args.q.unwrap_or(args.p / 3.0);
    let params = SbmParams::balanced(args.n, args.k, args.p, q, args.alpha);
    let opts = PairOptions {
        permutation: match args.permutation {
            PermutationArg::Within => PermutationMode::WithinCommunity,
            PermutationArg::Uniform => PermutationMode::Uniform,
            PermutationArg::Identity => PermutationMode::Identity,
        },
        keep_parent: false,
    };
    let pair = generate_correlated_pair(&params, args.seed, opts)?;
    fs::create_dir_all(&args.out)?;
    // the second graph names each vertex after its partner in the first
    let ids: Vec<String> = pair.truth.forward().iter().map(|v| v.to_string()).collect();
    save_graph(
        &pair.g_pi,
        None,
        &args.out.join("g1.edges"),
        &args.out.join("g1.labels"),
    )?;
    save_graph(
        &pair.g_prime,
        Some(&ids),
        &args.out.join("g2.edges"),
        &args.out.join("g2.labels"),
    )?;
    println!(
        "wrote {} vertices, {} + {} edges to {}",
        params.n(),
        pair.g_pi.graph.edge_count(),
        pair.g_prime.graph.edge_count(),
        args.out.display()
    );
    Ok(())
}

fn run_match(args: &MatchArgs) -> csbm::Result<()> {
    let pair = load_pair(&args.edges, &args.labels, &args.edges2, &args.labels2)?;
    let params = match (args.p, args.q) {
        (Some(p), Some(q)) => ParamSource::Known { p, q },
        _ => ParamSource::Estimated,
    };
    let cfg = args.pipeline.build(params, args.seed, true);
    info!("pipeline configuration: {cfg:?}");
    let res = full_pipeline(
        &pair.first.graph,
        &pair.second.graph,
        Some(&pair.truth),
        &cfg,
    )?;
    println!(
        "kprime={} ell={} w={} sign communities {:?} reserved {}",
        res.shape.kprime,
        res.shape.ell,
        res.shape.w,
        res.signature
            .selected
            .iter()
            .map(|&a| pair.first.graph.partition.original_label(a))
            .collect::<Vec<_>>(),
        pair.first.graph.partition.original_label(res.reserved),
    );
    for s in &res.stages {
        match s.accuracy {
            Some(a) => println!("{:<14} accuracy {a:.4}  {:.3}s", s.stage, s.seconds),
            None => println!("{:<14} {:>15}  {:.3}s", s.stage, "", s.seconds),
        }
    }
    if let Some(path) = &args.output {
        let mut out = BufWriter::new(File::create(path)?);
        for (v, &u) in res.permutation.forward().iter().enumerate() {
            writeln!(out, "{} {}", pair.second.ids[v], pair.first.ids[u])?;
        }
        out.flush()?;
    }
    Ok(())
}

fn need<T: Clone>(value: &Option<T>, flag: &str, mode: &str) -> csbm::Result<T> {
    value
        .clone()
        .ok_or_else(|| Error::Config(format!("--{flag} is required in {mode} mode")))
}

fn sweep(args: &SweepArgs) -> csbm::Result<()> {
    let real = args.mode != ModeArg::Synthetic;
    let input = match args.mode {
        ModeArg::Synthetic => ExperimentInput::Synthetic {
            n: need(&args.n, "n", "synthetic")?,
            k: need(&args.k, "k", "synthetic")?,
            q_ratio: args.q_ratio,
        },
        ModeArg::RealPair => ExperimentInput::RealPair {
            edges: need(&args.edges, "edges", "real-pair")?,
            labels: need(&args.labels, "labels", "real-pair")?,
            edges2: need(&args.edges2, "edges2", "real-pair")?,
            labels2: need(&args.labels2, "labels2", "real-pair")?,
        },
        ModeArg::RealResample => ExperimentInput::RealResample {
            edges: need(&args.edges, "edges", "real-resample")?,
            labels: need(&args.labels, "labels", "real-resample")?,
        },
    };
    if !real && args.p.is_empty() {
        return Err(Error::Config("--p is required in synthetic mode".into()));
    }
    if real && (args.n.is_some() || args.k.is_some()) {
        return Err(Error::Config(
            "--n and --k only apply to synthetic mode".into(),
        ));
    }
    if !real && (args.edges.is_some() || args.edges2.is_some()) {
        return Err(Error::Config(
            "graph files only apply to real-pair and real-resample modes".into(),
        ));
    }
    let cfg = ExperimentConfig {
        input,
        alphas: args.alpha.clone(),
        ps: args.p.clone(),
        repetitions: args.repetitions,
        master_seed: args.seed,
        pipeline: args.pipeline.build(ParamSource::Estimated, args.seed, real),
        known_params: !args.estimated,
        timings: args.timings,
    };
    let rows = run_experiment(&cfg)?;
    match &args.output {
        Some(path) => write_csv(&rows, File::create(path)?)?,
        None => write_csv(&rows, io::stdout().lock())?,
    }
    Ok(())
}

fn estimate(args: &EstimateArgs) -> csbm::Result<()> {
    let g = load_graph(&args.edges, &args.labels)?;
    let part = &g.graph.partition;
    let est = estimate_params_pooled(&[&g.graph])?;
    println!(
        "{} vertices, {} edges, {} communities ({} self-loops dropped)",
        g.graph.n(),
        g.graph.graph.edge_count(),
        part.k(),
        g.self_loops_dropped
    );
    println!("label\tsize\tp_hat\tvar_deg\tlog_mean\tlog_var\tq_hat to each community");
    for a in 0..est.k() {
        let qs: Vec<String> = (0..est.k())
            .filter(|&b| b != a)
            .map(|b| format!("{}:{:.5}", part.original_label(b), est.q_hat(a, b)))
            .collect();
        println!(
            "{}\t{}\t{:.5}\t{:.3}\t{:.4}\t{:.4}\t{}",
            part.original_label(a),
            est.sizes[a],
            est.p_hat(a),
            est.intra_variance[a],
            est.log_intra_mean[a],
            est.log_intra_variance[a],
            qs.join(" ")
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Match(a) => run_match(a),
        Command::Sweep(a) => sweep(a),
        Command::Estimate(a) => estimate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_data_error() { 3 } else { 2 })
        }
    }
}
