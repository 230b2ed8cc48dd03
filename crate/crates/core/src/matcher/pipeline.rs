use std::time::Instant;

use log::{debug, info};

use super::almost_exact::match_signatures;
use super::distance::build_similarity_matrix;
use super::refine::{refine_lap, refine_threshold};
use super::seeded::{seeded_match, seeded_match_greedy};
use super::MatchHyper;
use crate::assignment::solve_lap_min;
use crate::error::{Error, Result};
use crate::graph::{LabeledGraph, Permutation};
use crate::harness::estimate::{estimate_params_pooled, ParamEstimates};
use crate::par::Execution;
use crate::sbm::CorrelatedPair;
use crate::signature::{
    compute_signatures, default_hyperparams, select_communities, CommunitySelection,
    DegreeTransform, ParentRule, SignatureHyper, TreeShape,
};

/// How the target community is matched from signatures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stage1Route {
    /// Sampled distances below `|J| (1 - slack)`, then random cleanup.
    #[default]
    Threshold,
    /// Full-space similarity matrix solved as a linear assignment.
    Assignment,
}

/// How a matching is refined with witness counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Refinement {
    None,
    /// Unique-pair test against `ε² p̂ n / 512`.
    Threshold,
    /// Repeated maximum-weight assignment.
    #[default]
    Assignment,
}

/// Seeded propagation rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeedMode {
    /// Two-hop counts against `n_t n_s p̂ q̂ / 8`.
    #[default]
    Theory,
    /// Greedy on one-hop common-seed counts.
    Greedy,
}

/// Where densities, centers and thresholds come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamSource {
    /// True child densities.
    Known { p: f64, q: f64 },
    /// Medians and variances of observed degrees pooled over both graphs.
    Estimated,
}

/// Full configuration of one matching run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub kprime: Option<usize>,
    pub ell: Option<usize>,
    pub w: Option<usize>,
    pub threshold_slack: Option<f64>,
    pub selection: CommunitySelection,
    pub transform: DegreeTransform,
    pub parent_rule: ParentRule,
    pub params: ParamSource,
    pub stage1: Stage1Route,
    pub refinement: Refinement,
    pub epsilon_refine: f64,
    pub refine_rounds: usize,
    pub seed_mode: SeedMode,
    /// Also refine every community matched by seeding.
    pub refine_seeded: bool,
    pub seed: u64,
    pub exec: Execution,
}

impl PipelineConfig {
    /// Thresholded signature matching, assignment refinement of the target
    /// community, two-hop seeded propagation.
    pub fn new(params: ParamSource, seed: u64) -> Self {
        PipelineConfig {
            kprime: None,
            ell: None,
            w: None,
            threshold_slack: None,
            selection: CommunitySelection::Largest,
            transform: DegreeTransform::Raw,
            parent_rule: ParentRule::SmallestCode,
            params,
            stage1: Stage1Route::Threshold,
            refinement: Refinement::Assignment,
            epsilon_refine: 0.3,
            refine_rounds: 16,
            seed_mode: SeedMode::Theory,
            refine_seeded: false,
            seed,
            exec: Execution::Parallel,
        }
    }

    /// Similarity-matrix assignment, greedy one-hop seeding, and assignment
    /// refinement of every community, with `kprime = 4` and `ell = 2`.
    pub fn experiment(params: ParamSource, seed: u64) -> Self {
        PipelineConfig {
            kprime: Some(4),
            ell: Some(2),
            stage1: Stage1Route::Assignment,
            seed_mode: SeedMode::Greedy,
            refine_seeded: true,
            ..Self::new(params, seed)
        }
    }

    pub fn with_shape(mut self, kprime: usize, ell: usize) -> Self {
        self.kprime = Some(kprime);
        self.ell = Some(ell);
        self
    }
}

/// Timing and (when ground truth is known) accuracy of one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    pub stage: &'static str,
    pub accuracy: Option<f64>,
    pub seconds: f64,
}

/// Output of [`full_pipeline`].
#[derive(Debug, Clone)]
pub struct MatchResult {
    /// Per community: local index in the second graph → local index in the first.
    pub communities: Vec<Permutation>,
    /// Global map from vertices of the second graph to the first.
    pub permutation: Permutation,
    pub stages: Vec<StageRecord>,
    pub shape: TreeShape,
    pub signature: SignatureHyper,
    pub reserved: usize,
}

impl MatchResult {
    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.stage == name)
    }

    pub fn overall_accuracy(&self) -> Option<f64> {
        self.stage("overall").and_then(|s| s.accuracy)
    }
}

/// Ground truth restricted to community `a`, in local indices.
pub fn local_truth(
    g: &LabeledGraph,
    g2: &LabeledGraph,
    truth: &Permutation,
    a: usize,
) -> Result<Permutation> {
    let forward = g2
        .partition
        .members(a)
        .iter()
        .map(|&v| {
            let u = truth.apply(v);
            if g.partition.label(u) != a {
                return Err(Error::arg(format!(
                    "ground truth moves vertex {v} out of community {a}"
                )));
            }
            Ok(g.partition.local_index(u))
        })
        .collect::<Result<Vec<_>>>()?;
    Permutation::from_forward(forward)
}

struct Densities {
    /// Intra density per community.
    p: Vec<f64>,
    /// `q[a][b]`: density of edges from `C_a` into `C_b`.
    q: Vec<Vec<f64>>,
}

fn signature_hyper(
    part: &crate::graph::CommunityPartition,
    shape: TreeShape,
    selected: Vec<usize>,
    reserved: usize,
    cfg: &PipelineConfig,
    dens: &Densities,
    est: Option<&ParamEstimates>,
) -> Result<SignatureHyper> {
    let target = part.smallest();
    let n_k = part.size(target) as f64;
    let sign_thresholds = selected
        .iter()
        .map(|&a| part.size(a) as f64 * dens.q[target][a])
        .collect();
    let (center, unit_variance) = match (cfg.transform, est) {
        (DegreeTransform::Log, Some(e)) => (e.log_intra_mean[target], e.log_intra_variance[target]),
        (DegreeTransform::Log, None) => unreachable!("log transform always estimates"),
        (DegreeTransform::Raw, Some(e)) if cfg.params == ParamSource::Estimated => {
            (e.intra_median[target], e.intra_variance[target])
        }
        (DegreeTransform::Raw, _) => {
            let p = dens.p[target];
            (n_k * p, n_k * p * (1.0 - p))
        }
    };
    let hyper = SignatureHyper {
        kprime: shape.kprime,
        ell: shape.ell,
        target,
        selected,
        reserved: Some(reserved),
        transform: cfg.transform,
        parent_rule: cfg.parent_rule,
        center,
        unit_variance,
        sign_thresholds,
    };
    hyper.validate(part)?;
    Ok(hyper)
}

fn accuracy_of(found: &Permutation, truth: Option<&Permutation>) -> Option<f64> {
    truth.map(|t| {
        if t.is_empty() {
            1.0
        } else {
            found.agreement(t) as f64 / t.len() as f64
        }
    })
}

fn refine_community(
    g: &LabeledGraph,
    g2: &LabeledGraph,
    a: usize,
    pi0: &Permutation,
    p_hat: f64,
    cfg: &PipelineConfig,
) -> Result<Permutation> {
    let (h, h2) = (g.community_subgraph(a), g2.community_subgraph(a));
    match cfg.refinement {
        Refinement::None => Ok(pi0.clone()),
        Refinement::Threshold => {
            refine_threshold(&h, &h2, pi0, cfg.epsilon_refine, p_hat, cfg.exec)
        }
        Refinement::Assignment => refine_lap(&h, &h2, pi0, cfg.refine_rounds, cfg.exec),
    }
}

/// Matches `g` (relabeled graph) against `g2` community by community.
///
/// Stage order: signatures and matching of the smallest community, its
/// refinement, seeded matching of the reserved community from it, and
/// seeded matching of every remaining community from the reserved one.
pub fn full_pipeline(
    g: &LabeledGraph,
    g2: &LabeledGraph,
    truth: Option<&Permutation>,
    cfg: &PipelineConfig,
) -> Result<MatchResult> {
    let total_start = Instant::now();
    g.partition.check_compatible(&g2.partition)?;
    let part = &g.partition;
    let k = part.k();
    if k < 3 {
        return Err(Error::config(format!(
            "the pipeline needs at least 3 communities (target, reserved, signature); found {k}"
        )));
    }
    if let Some(t) = truth {
        if t.len() != g.n() {
            return Err(Error::arg("ground truth size differs from the graphs"));
        }
    }
    let truths: Option<Vec<Permutation>> = truth
        .map(|t| (0..k).map(|a| local_truth(g, g2, t, a)).collect())
        .transpose()?;
    let truth_of = |a: usize| truths.as_ref().map(|ts| &ts[a]);

    let est = match (cfg.params, cfg.transform) {
        (ParamSource::Estimated, _) | (_, DegreeTransform::Log) => {
            Some(estimate_params_pooled(&[g, g2])?)
        }
        _ => None,
    };
    let dens = match (cfg.params, &est) {
        (ParamSource::Known { p, q }, _) => Densities {
            p: vec![p; k],
            q: vec![vec![q; k]; k],
        },
        (ParamSource::Estimated, Some(e)) => Densities {
            p: (0..k).map(|a| e.p_hat(a)).collect(),
            q: (0..k)
                .map(|a| (0..k).map(|b| e.q_hat(a, b)).collect())
                .collect(),
        },
        (ParamSource::Estimated, None) => unreachable!(),
    };

    let target = part.smallest();
    let n_k = part.size(target);
    let shape = match (cfg.kprime, cfg.ell) {
        (Some(kprime), Some(ell)) => TreeShape {
            kprime,
            ell,
            w: MatchHyper::for_community_size(n_k, cfg.seed).w,
        },
        (kp, l) => {
            let base = default_hyperparams(n_k, dens.p[target], k)?;
            TreeShape {
                kprime: kp.unwrap_or(base.kprime),
                ell: l.unwrap_or(base.ell),
                w: base.w,
            }
        }
    };
    let mut hyper = MatchHyper::for_community_size(n_k, cfg.seed);
    hyper.w = cfg.w.unwrap_or(shape.w);
    if let Some(slack) = cfg.threshold_slack {
        hyper.threshold_slack = slack;
    }
    hyper.epsilon_refine = cfg.epsilon_refine;
    hyper.refine_rounds = cfg.refine_rounds;
    hyper.seed_mode = cfg.seed_mode;
    hyper.validate()?;
    let shape = TreeShape {
        w: hyper.w,
        ..shape
    };

    let (selected, reserved) = select_communities(part, shape.kprime, cfg.selection)?;
    let sig_hyper = signature_hyper(part, shape, selected, reserved, cfg, &dens, est.as_ref())?;
    info!(
        "target community {target} ({n_k} vertices), kprime = {}, ell = {}, w = {}, \
         sign communities {:?}, reserved {reserved}",
        shape.kprime, shape.ell, hyper.w, sig_hyper.selected
    );

    let mut stages = Vec::new();
    let mut communities: Vec<Option<Permutation>> = vec![None; k];

    let t0 = Instant::now();
    let sigs = compute_signatures(g, &sig_hyper, cfg.exec)?;
    let sigs2 = compute_signatures(g2, &sig_hyper, cfg.exec)?;
    stages.push(StageRecord {
        stage: "signatures",
        accuracy: None,
        seconds: t0.elapsed().as_secs_f64(),
    });

    let t0 = Instant::now();
    let initial = match cfg.stage1 {
        Stage1Route::Threshold => {
            let out = match_signatures(
                &sigs,
                &sigs2,
                sig_hyper.index_bits(),
                shape.kprime,
                shape.ell,
                &hyper,
                cfg.exec,
            )?;
            debug!(
                "thresholded matching: |J| = {}, threshold {:.3}, {} candidate pairs, {} fixed by cleanup",
                out.index_set_len, out.threshold, out.candidate_pairs, out.cleanup_matched
            );
            out.permutation
        }
        Stage1Route::Assignment => {
            let s = build_similarity_matrix(&sigs, &sigs2, cfg.exec)?;
            solve_lap_min(&s.into_cost_matrix())
        }
    };
    stages.push(StageRecord {
        stage: "almost_exact",
        accuracy: accuracy_of(&initial, truth_of(target)),
        seconds: t0.elapsed().as_secs_f64(),
    });

    let t0 = Instant::now();
    let refined = refine_community(g, g2, target, &initial, dens.p[target], cfg)?;
    stages.push(StageRecord {
        stage: "refine_target",
        accuracy: accuracy_of(&refined, truth_of(target)),
        seconds: t0.elapsed().as_secs_f64(),
    });
    communities[target] = Some(refined);

    let seed_step = |seeds: &Permutation, s: usize, t: usize| -> Result<Permutation> {
        match cfg.seed_mode {
            SeedMode::Theory => seeded_match(g, g2, seeds, s, t, dens.p[t], dens.q[t][s], cfg.exec),
            SeedMode::Greedy => seeded_match_greedy(g, g2, seeds, s, t, cfg.exec),
        }
    };

    let t0 = Instant::now();
    let seeds_k = communities[target].clone().expect("target matched");
    let mut reserved_match = seed_step(&seeds_k, target, reserved)?;
    if cfg.refine_seeded {
        reserved_match = refine_community(g, g2, reserved, &reserved_match, dens.p[reserved], cfg)?;
    }
    stages.push(StageRecord {
        stage: "seed_reserved",
        accuracy: accuracy_of(&reserved_match, truth_of(reserved)),
        seconds: t0.elapsed().as_secs_f64(),
    });
    communities[reserved] = Some(reserved_match);

    let t0 = Instant::now();
    let seeds_r = communities[reserved].clone().expect("reserved matched");
    let (mut hits, mut total) = (0usize, 0usize);
    for a in (0..k).filter(|&a| a != target && a != reserved) {
        let mut found = seed_step(&seeds_r, reserved, a)?;
        if cfg.refine_seeded {
            found = refine_community(g, g2, a, &found, dens.p[a], cfg)?;
        }
        if let Some(t) = truth_of(a) {
            hits += found.agreement(t);
            total += t.len();
        }
        communities[a] = Some(found);
    }
    stages.push(StageRecord {
        stage: "seed_rest",
        accuracy: truths.as_ref().map(|_| {
            if total == 0 {
                1.0
            } else {
                hits as f64 / total as f64
            }
        }),
        seconds: t0.elapsed().as_secs_f64(),
    });

    let communities: Vec<Permutation> = communities
        .into_iter()
        .map(|c| c.expect("every community matched"))
        .collect();
    let mut forward = vec![0; g.n()];
    for (a, local) in communities.iter().enumerate() {
        let (m, m2) = (g.partition.members(a), g2.partition.members(a));
        for (x, &v) in m2.iter().enumerate() {
            forward[v] = m[local.apply(x)];
        }
    }
    let permutation = Permutation::from_forward(forward)?;
    stages.push(StageRecord {
        stage: "overall",
        accuracy: accuracy_of(&permutation, truth),
        seconds: total_start.elapsed().as_secs_f64(),
    });

    Ok(MatchResult {
        communities,
        permutation,
        stages,
        shape,
        signature: sig_hyper,
        reserved,
    })
}

/// Runs the pipeline on a sampled pair, scoring against its hidden truth.
pub fn run_pair(pair: &CorrelatedPair, cfg: &PipelineConfig) -> Result<MatchResult> {
    full_pipeline(&pair.g_pi, &pair.g_prime, Some(&pair.truth), cfg)
}
