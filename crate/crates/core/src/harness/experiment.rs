//! Sweeps over correlation and density, written as one CSV row per stage.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};

use super::io::{load_graph, load_pair, LoadedGraph, LoadedPair};
use crate::error::{Error, Result};
use crate::graph::{LabeledGraph, Permutation};
use crate::matcher::{full_pipeline, MatchResult, ParamSource, PipelineConfig};
use crate::rng::derive_seed;
use crate::sbm::{generate_correlated_pair, resample_labeled, PairOptions, SbmParams};

/// Environment variable bounding the number of sweep workers.
pub const THREADS_ENV: &str = "CSBM_THREADS";

pub const CSV_HEADER: [&str; 14] = [
    "run_id", "mode", "n", "k", "p", "q", "alpha", "kprime", "ell", "w", "stage", "accuracy",
    "seconds", "seed",
];

/// Where the graphs of each run come from.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentInput {
    /// Balanced SBM with `k` communities; `q = q_ratio · p` for every `p` swept.
    Synthetic { n: usize, k: usize, q_ratio: f64 },
    /// Two observed graphs sharing vertex ids.
    RealPair {
        edges: PathBuf,
        labels: PathBuf,
        edges2: PathBuf,
        labels2: PathBuf,
    },
    /// One observed graph used as the parent and subsampled twice per run.
    RealResample { edges: PathBuf, labels: PathBuf },
}

impl ExperimentInput {
    pub fn mode_name(&self) -> &'static str {
        match self {
            ExperimentInput::Synthetic { .. } => "synthetic",
            ExperimentInput::RealPair { .. } => "real-pair",
            ExperimentInput::RealResample { .. } => "real-resample",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub input: ExperimentInput,
    /// Edge deletion probabilities swept (ignored for real pairs).
    pub alphas: Vec<f64>,
    /// Child intra densities swept (synthetic only).
    pub ps: Vec<f64>,
    pub repetitions: usize,
    pub master_seed: u64,
    /// Template for every run; `seed` and, for synthetic runs with known
    /// parameters, `params` are filled in per run.
    pub pipeline: PipelineConfig,
    /// Use the true `p, q` on synthetic runs instead of degree estimates.
    pub known_params: bool,
    /// Record wall-clock seconds. Off keeps the CSV byte-stable.
    pub timings: bool,
}

impl ExperimentConfig {
    pub fn synthetic(n: usize, k: usize, pipeline: PipelineConfig) -> Self {
        ExperimentConfig {
            input: ExperimentInput::Synthetic {
                n,
                k,
                q_ratio: 1.0 / 3.0,
            },
            alphas: vec![0.0],
            ps: vec![0.08],
            repetitions: 1,
            master_seed: 0,
            pipeline,
            known_params: true,
            timings: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::config("repetitions must be at least 1"));
        }
        let alpha_needed = !matches!(self.input, ExperimentInput::RealPair { .. });
        if alpha_needed && self.alphas.is_empty() {
            return Err(Error::config("no alpha values to sweep"));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(0.0..1.0).contains(*a)) {
            return Err(Error::config(format!("alpha {a} not in [0, 1)")));
        }
        match &self.input {
            ExperimentInput::Synthetic { n, k, q_ratio } => {
                if self.ps.is_empty() {
                    return Err(Error::config("no p values to sweep"));
                }
                if *k < 3 || n < k {
                    return Err(Error::config(format!(
                        "need 3 <= k <= n, got n = {n}, k = {k}"
                    )));
                }
                if !(0.0..=1.0).contains(q_ratio) {
                    return Err(Error::config(format!("q/p ratio {q_ratio} not in [0, 1]")));
                }
                for &p in &self.ps {
                    SbmParams::balanced(*n, *k, p, p * q_ratio, self.alphas[0])
                        .validate()
                        .map_err(|e| Error::config(e.to_string()))?;
                }
            }
            _ if !self.ps.is_empty() => {
                return Err(Error::config("a p sweep only applies to synthetic runs"));
            }
            _ => {}
        }
        Ok(())
    }

    /// Sweep points in output order: `p` outer, `alpha` inner.
    pub fn grid(&self) -> Vec<GridPoint> {
        match self.input {
            ExperimentInput::RealPair { .. } => vec![GridPoint {
                p: None,
                alpha: None,
            }],
            ExperimentInput::RealResample { .. } => self
                .alphas
                .iter()
                .map(|&a| GridPoint {
                    p: None,
                    alpha: Some(a),
                })
                .collect(),
            ExperimentInput::Synthetic { .. } => self
                .ps
                .iter()
                .flat_map(|&p| {
                    self.alphas.iter().map(move |&a| GridPoint {
                        p: Some(p),
                        alpha: Some(a),
                    })
                })
                .collect(),
        }
    }

    /// Seed of repetition `rep` at grid position `point`.
    pub fn run_seed(&self, point: usize, rep: usize) -> u64 {
        derive_seed(self.master_seed, (point * self.repetitions + rep) as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub p: Option<f64>,
    pub alpha: Option<f64>,
}

/// One CSV line.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub run_id: usize,
    pub mode: &'static str,
    pub n: usize,
    pub k: usize,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub kprime: Option<usize>,
    pub ell: Option<usize>,
    pub w: Option<usize>,
    /// Stage name, or `error` for a failed run.
    pub stage: String,
    pub accuracy: Option<f64>,
    pub seconds: Option<f64>,
    pub seed: u64,
}

impl ResultRow {
    fn record(&self) -> [String; 14] {
        fn opt<T: ToString>(x: Option<T>) -> String {
            x.map(|v| v.to_string()).unwrap_or_default()
        }
        [
            self.run_id.to_string(),
            self.mode.to_string(),
            self.n.to_string(),
            self.k.to_string(),
            opt(self.p),
            opt(self.q),
            opt(self.alpha),
            opt(self.kprime),
            opt(self.ell),
            opt(self.w),
            self.stage.clone(),
            opt(self.accuracy),
            opt(self.seconds),
            self.seed.to_string(),
        ]
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(rows: &[ResultRow], path: &Path) -> Result<()> {
    write_csv(rows, std::fs::File::create(path)?)
}

/// Inputs loaded once and shared by every run.
enum Prepared {
    Synthetic,
    Pair(Box<LoadedPair>),
    Parent(Box<LoadedGraph>),
}

fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    Ok(match &cfg.input {
        ExperimentInput::Synthetic { .. } => Prepared::Synthetic,
        ExperimentInput::RealPair {
            edges,
            labels,
            edges2,
            labels2,
        } => Prepared::Pair(Box::new(load_pair(edges, labels, edges2, labels2)?)),
        ExperimentInput::RealResample { edges, labels } => {
            Prepared::Parent(Box::new(load_graph(edges, labels)?))
        }
    })
}

struct RunOutcome {
    n: usize,
    k: usize,
    q: Option<f64>,
    result: Result<MatchResult>,
}

fn match_with(
    g: &LabeledGraph,
    g2: &LabeledGraph,
    truth: &Permutation,
    mut pipeline: PipelineConfig,
    params: ParamSource,
    seed: u64,
) -> Result<MatchResult> {
    pipeline.params = params;
    pipeline.seed = seed;
    full_pipeline(g, g2, Some(truth), &pipeline)
}

fn run_one(cfg: &ExperimentConfig, prepared: &Prepared, point: GridPoint, seed: u64) -> RunOutcome {
    let opts = PairOptions {
        keep_parent: false,
        ..PairOptions::default()
    };
    match (prepared, &cfg.input) {
        (Prepared::Synthetic, ExperimentInput::Synthetic { n, k, q_ratio }) => {
            let p = point.p.expect("synthetic points carry p");
            let q = p * q_ratio;
            let params = SbmParams::balanced(*n, *k, p, q, point.alpha.unwrap_or(0.0));
            let source = if cfg.known_params {
                ParamSource::Known { p, q }
            } else {
                ParamSource::Estimated
            };
            let result = generate_correlated_pair(&params, seed, opts).and_then(|pair| {
                match_with(
                    &pair.g_pi,
                    &pair.g_prime,
                    &pair.truth,
                    cfg.pipeline.clone(),
                    source,
                    seed,
                )
            });
            RunOutcome {
                n: *n,
                k: *k,
                q: Some(q),
                result,
            }
        }
        (Prepared::Pair(pair), _) => RunOutcome {
            n: pair.first.graph.n(),
            k: pair.first.graph.partition.k(),
            q: None,
            result: match_with(
                &pair.first.graph,
                &pair.second.graph,
                &pair.truth,
                cfg.pipeline.clone(),
                ParamSource::Estimated,
                seed,
            ),
        },
        (Prepared::Parent(parent), _) => {
            let part = &parent.graph.partition;
            let params = SbmParams {
                sizes: part.sizes(),
                p: 0.0,
                q: 0.0,
                alpha: point.alpha.unwrap_or(0.0),
            };
            let result =
                resample_labeled(&parent.graph.graph, part, params, seed, opts).and_then(|pair| {
                    match_with(
                        &pair.g_pi,
                        &pair.g_prime,
                        &pair.truth,
                        cfg.pipeline.clone(),
                        ParamSource::Estimated,
                        seed,
                    )
                });
            RunOutcome {
                n: parent.graph.n(),
                k: part.k(),
                q: None,
                result,
            }
        }
        (Prepared::Synthetic, _) => unreachable!("prepared input follows the config"),
    }
}

fn rows_for(
    cfg: &ExperimentConfig,
    run_id: usize,
    point: GridPoint,
    seed: u64,
    outcome: RunOutcome,
) -> Vec<ResultRow> {
    let base = ResultRow {
        run_id,
        mode: cfg.input.mode_name(),
        n: outcome.n,
        k: outcome.k,
        p: point.p,
        q: outcome.q,
        alpha: point.alpha,
        kprime: None,
        ell: None,
        w: None,
        stage: String::new(),
        accuracy: None,
        seconds: None,
        seed,
    };
    match outcome.result {
        Ok(res) => res
            .stages
            .iter()
            .map(|s| ResultRow {
                kprime: Some(res.shape.kprime),
                ell: Some(res.shape.ell),
                w: Some(res.shape.w),
                stage: s.stage.to_string(),
                accuracy: s.accuracy,
                seconds: cfg.timings.then_some(s.seconds),
                ..base.clone()
            })
            .collect(),
        Err(e) => {
            warn!("run {run_id} (seed {seed}) failed: {e}");
            vec![ResultRow {
                stage: "error".to_string(),
                ..base
            }]
        }
    }
}

/// Runs one repetition outside a sweep; `seed` is the row's recorded seed.
pub fn replay(cfg: &ExperimentConfig, point: GridPoint, seed: u64) -> Result<MatchResult> {
    cfg.validate()?;
    let prepared = prepare(cfg)?;
    run_one(cfg, &prepared, point, seed).result
}

fn worker_count() -> Option<usize> {
    let raw = std::env::var(THREADS_ENV).ok()?;
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => Some(n),
        _ => {
            warn!("ignoring {THREADS_ENV}={raw:?}: expected a positive integer");
            None
        }
    }
}

/// Runs every (grid point, repetition) pair and returns rows in that order.
///
/// Runs execute on a worker pool sized by `CSBM_THREADS` (default: all
/// cores). Loading errors and invalid configurations abort; a failing run
/// only contributes an `error` row.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let prepared = prepare(cfg)?;
    let grid = cfg.grid();
    let jobs: Vec<(usize, GridPoint, u64)> = grid
        .iter()
        .enumerate()
        .flat_map(|(gi, &point)| {
            (0..cfg.repetitions)
                .map(move |rep| (gi * cfg.repetitions + rep, point, cfg.run_seed(gi, rep)))
        })
        .collect();
    info!(
        "{} runs ({} grid points x {} repetitions)",
        jobs.len(),
        grid.len(),
        cfg.repetitions
    );
    let start = Instant::now();
    let run = |&(id, point, seed): &(usize, GridPoint, u64)| {
        let outcome = run_one(cfg, &prepared, point, seed);
        rows_for(cfg, id, point, seed, outcome)
    };
    let per_run: Vec<Vec<ResultRow>> = run_jobs(&jobs, run)?;
    info!("sweep finished in {:.1}s", start.elapsed().as_secs_f64());
    Ok(per_run.into_iter().flatten().collect())
}

#[cfg(feature = "parallel")]
fn run_jobs<J, T, F>(jobs: &[J], f: F) -> Result<Vec<T>>
where
    J: Sync,
    T: Send,
    F: Fn(&J) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| jobs.par_iter().map(f).collect()))
}

#[cfg(not(feature = "parallel"))]
fn run_jobs<J, T, F>(jobs: &[J], f: F) -> Result<Vec<T>>
where
    F: Fn(&J) -> T,
{
    if let Some(n) = worker_count() {
        if n > 1 {
            warn!("{THREADS_ENV}={n} ignored: built without the parallel feature");
        }
    }
    Ok(jobs.iter().map(f).collect())
}
