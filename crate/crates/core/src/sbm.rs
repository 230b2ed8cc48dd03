//! Correlated stochastic block model sampling.
//!
//! A parent graph is drawn from an SBM with edge probabilities `p/(1-α)`
//! inside communities and `q/(1-α)` across them; two children keep each
//! parent edge independently with probability `1-α`, so each child is
//! marginally an SBM with parameters `(p, q)`. One child is then relabeled by
//! a hidden permutation.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{CommunityPartition, Graph, LabeledGraph, Permutation, Vertex};
use crate::rng::{stream, Stream};

/// Parameters of a correlated SBM.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmParams {
    /// Community sizes; vertices are laid out in contiguous blocks.
    pub sizes: Vec<usize>,
    /// Intra-community edge probability of each child.
    pub p: f64,
    /// Inter-community edge probability of each child.
    pub q: f64,
    /// Edge deletion probability; `1 - alpha` is the correlation.
    pub alpha: f64,
}

impl SbmParams {
    /// `k` communities of `n / k` vertices (the remainder goes to the first ones).
    pub fn balanced(n: usize, k: usize, p: f64, q: f64, alpha: f64) -> Self {
        let k = k.max(1);
        let sizes = (0..k).map(|a| n / k + usize::from(a < n % k)).collect();
        SbmParams { sizes, p, q, alpha }
    }

    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn parent_intra(&self) -> f64 {
        self.p / (1.0 - self.alpha)
    }

    pub fn parent_inter(&self) -> f64 {
        self.q / (1.0 - self.alpha)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::param("at least one community is required"));
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::param(format!(
                "alpha = {} not in [0, 1)",
                self.alpha
            )));
        }
        for (name, x) in [("p", self.p), ("q", self.q)] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::param(format!("{name} = {x} not in [0, 1]")));
            }
        }
        if self.p < self.q {
            return Err(Error::param(format!(
                "p = {} must not be below q = {}",
                self.p, self.q
            )));
        }
        if self.parent_intra() > 1.0 || self.parent_inter() > 1.0 {
            return Err(Error::param(format!(
                "parent probabilities p/(1-α) = {:.4}, q/(1-α) = {:.4} exceed 1",
                self.parent_intra(),
                self.parent_inter()
            )));
        }
        Ok(())
    }

    pub fn partition(&self) -> CommunityPartition {
        CommunityPartition::from_sizes(&self.sizes)
    }
}

/// How the hidden permutation is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PermutationMode {
    /// Uniform within each community; labels are unchanged by relabeling.
    #[default]
    WithinCommunity,
    /// Uniform over all vertices; labels travel with the vertices.
    Uniform,
    /// No relabeling.
    Identity,
}

/// Two correlated children with the hidden alignment between them.
#[derive(Debug, Clone)]
pub struct CorrelatedPair {
    /// `G^π`: first child with vertices relabeled by `truth`.
    pub g_pi: LabeledGraph,
    /// `G'`: second child in the parent's labeling.
    pub g_prime: LabeledGraph,
    /// Vertex `v` of `g_prime` corresponds to `truth.apply(v)` in `g_pi`.
    pub truth: Permutation,
    pub parent: Option<Graph>,
    pub params: SbmParams,
}

/// Calls `emit(x)` for every `x < len` selected independently with
/// probability `prob`, using geometric skips.
fn bernoulli_positions<R, F>(len: usize, prob: f64, rng: &mut R, mut emit: F)
where
    R: Rng + ?Sized,
    F: FnMut(usize),
{
    if len == 0 || prob <= 0.0 {
        return;
    }
    if prob >= 1.0 {
        (0..len).for_each(emit);
        return;
    }
    let log_q = (-prob).ln_1p();
    let mut x = 0usize;
    loop {
        // U in (0, 1]
        let u: f64 = 1.0 - rng.random::<f64>();
        let skip = (u.ln() / log_q).floor();
        if skip >= (len - x) as f64 {
            return;
        }
        x += skip as usize;
        emit(x);
        x += 1;
        if x >= len {
            return;
        }
    }
}

/// Samples the parent SBM graph `G₀`.
pub fn sample_parent<R: Rng + ?Sized>(params: &SbmParams, rng: &mut R) -> Result<Graph> {
    params.validate()?;
    let n = params.n();
    let mut starts = Vec::with_capacity(params.k() + 1);
    let mut acc = 0;
    for &s in &params.sizes {
        starts.push(acc);
        acc += s;
    }
    starts.push(n);

    let (pin, pout) = (params.parent_intra(), params.parent_inter());
    let mut edges = Vec::new();
    for (a, w) in starts.windows(2).enumerate() {
        for u in w[0]..w[1] {
            // rest of u's own block, then every later block
            for b in a..params.k() {
                let lo = if b == a { u + 1 } else { starts[b] };
                let hi = starts[b + 1];
                let prob = if b == a { pin } else { pout };
                bernoulli_positions(hi - lo, prob, rng, |x| edges.push((u, lo + x)));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Keeps each parent edge independently with probability `1 - alpha`.
pub fn subsample_child<R: Rng + ?Sized>(parent: &Graph, alpha: f64, rng: &mut R) -> Result<Graph> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::param(format!("alpha = {alpha} not in [0, 1)")));
    }
    let edges: Vec<(Vertex, Vertex)> = parent.edges().collect();
    let mut kept = Vec::with_capacity(edges.len());
    bernoulli_positions(edges.len(), 1.0 - alpha, rng, |x| kept.push(edges[x]));
    Graph::from_edges(parent.n(), kept)
}

fn hidden_permutation<R: Rng + ?Sized>(
    part: &CommunityPartition,
    mode: PermutationMode,
    rng: &mut R,
) -> Permutation {
    let n = part.n();
    match mode {
        PermutationMode::Identity => Permutation::identity(n),
        PermutationMode::Uniform => Permutation::random(n, rng),
        PermutationMode::WithinCommunity => {
            let mut forward = vec![0; n];
            for a in 0..part.k() {
                let members = part.members(a);
                let local = Permutation::random(members.len(), rng);
                for (x, &v) in members.iter().enumerate() {
                    forward[v] = members[local.apply(x)];
                }
            }
            Permutation::from_forward(forward).expect("blockwise shuffle is a bijection")
        }
    }
}

/// Options for [`generate_correlated_pair`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairOptions {
    pub permutation: PermutationMode,
    /// Drop the parent graph after sampling the children.
    pub keep_parent: bool,
}

impl Default for PairOptions {
    fn default() -> Self {
        PairOptions {
            permutation: PermutationMode::WithinCommunity,
            keep_parent: true,
        }
    }
}

/// Samples `G₀`, two children, and a hidden permutation from independent
/// streams of `seed`.
pub fn generate_correlated_pair(
    params: &SbmParams,
    seed: u64,
    opts: PairOptions,
) -> Result<CorrelatedPair> {
    let parent = sample_parent(params, &mut stream(seed, Stream::Parent))?;
    correlated_children(&parent, params, seed, opts)
}

/// Subsamples two children of an existing parent and hides the alignment.
pub fn correlated_children(
    parent: &Graph,
    params: &SbmParams,
    seed: u64,
    opts: PairOptions,
) -> Result<CorrelatedPair> {
    let part = params.partition();
    resample_labeled(parent, &part, params.clone(), seed, opts)
}

/// As [`correlated_children`], for a parent carrying arbitrary labels.
pub fn resample_labeled(
    parent: &Graph,
    part: &CommunityPartition,
    params: SbmParams,
    seed: u64,
    opts: PairOptions,
) -> Result<CorrelatedPair> {
    if part.n() != parent.n() {
        return Err(Error::arg("partition does not cover the parent graph"));
    }
    let child = subsample_child(parent, params.alpha, &mut stream(seed, Stream::ChildPi))?;
    let child_prime = subsample_child(parent, params.alpha, &mut stream(seed, Stream::ChildPrime))?;
    let truth = hidden_permutation(
        part,
        opts.permutation,
        &mut stream(seed, Stream::Permutation),
    );

    let g_pi = child.apply_permutation(&truth)?;
    let pi_labels: Vec<String> = (0..parent.n())
        .map(|v| {
            part.original_label(part.label(truth.apply_inverse(v)))
                .to_string()
        })
        .collect();
    let prime_labels: Vec<String> = (0..parent.n())
        .map(|v| part.original_label(part.label(v)).to_string())
        .collect();
    let pi_part = CommunityPartition::from_labels(&pi_labels);
    let prime_part = CommunityPartition::from_labels(&prime_labels);

    Ok(CorrelatedPair {
        g_pi: LabeledGraph::new(g_pi, pi_part)?,
        g_prime: LabeledGraph::new(child_prime, prime_part)?,
        truth,
        parent: opts.keep_parent.then(|| parent.clone()),
        params,
    })
}

impl CorrelatedPair {
    /// Fraction of `g_prime` edges whose image under `truth` is an edge of `g_pi`.
    pub fn aligned_edge_overlap(&self) -> f64 {
        let g = &self.g_pi.graph;
        let mut total = 0usize;
        let mut shared = 0usize;
        for (u, v) in self.g_prime.graph.edges() {
            total += 1;
            if g.has_edge(self.truth.apply(u), self.truth.apply(v)) {
                shared += 1;
            }
        }
        if total == 0 {
            return 0.0;
        }
        shared as f64 / total as f64
    }
}
