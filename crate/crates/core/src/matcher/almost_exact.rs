use rand::seq::SliceRandom;

use super::distance::{sample_index_set, IndexSet};
use super::MatchHyper;
use crate::error::Result;
use crate::graph::{permutation::complete_smallest_first, LabeledGraph, Permutation};
use crate::par::{map_range, Execution};
use crate::rng::{stream, Stream};
use crate::signature::{compute_signatures, SignatureHyper, SignatureSet};

/// Diagnostics of one thresholded matching run.
#[derive(Debug, Clone)]
pub struct AlmostExactOutcome {
    /// Local `C_k` index in the second graph → local index in the first.
    pub permutation: Permutation,
    /// Pairs below the distance threshold.
    pub candidate_pairs: usize,
    /// Pairs fixed by the cleanup before the arbitrary completion.
    pub cleanup_matched: usize,
    pub threshold: f64,
    pub index_set_len: u64,
}

/// Thresholded matching of the target community from its signatures.
///
/// Pairs whose sampled normalized distance is below `|J| (1 - slack)` form a
/// bipartite graph; its edges are visited in a random order and accepted when
/// both endpoints are still free, which is the same as repeatedly choosing a
/// uniformly random remaining edge. Leftover vertices are paired in
/// increasing id order.
pub fn match_signatures(
    sigs: &[SignatureSet],
    sigs2: &[SignatureSet],
    index_bits: usize,
    kprime: usize,
    ell: usize,
    hyper: &MatchHyper,
    exec: Execution,
) -> Result<AlmostExactOutcome> {
    let n = sigs.len();
    debug_assert_eq!(sigs2.len(), n);
    debug_assert_eq!(kprime * ell, index_bits);
    let j = sample_index_set(kprime, ell, hyper.w, hyper.seed)?;
    let threshold = j.len() as f64 * (1.0 - hyper.threshold_slack);

    let rows: Vec<Vec<(usize, usize)>> = map_range(exec, n, |i| {
        (0..n)
            .filter(|&jj| sigs[i].distance(&sigs2[jj], &j) < threshold)
            .map(|jj| (i, jj))
            .collect()
    });
    let mut edges: Vec<(usize, usize)> = rows.into_iter().flatten().collect();
    let candidate_pairs = edges.len();
    edges.shuffle(&mut stream(hyper.seed, Stream::Cleanup));

    let mut row_used = vec![false; n];
    let mut partial: Vec<Option<usize>> = vec![None; n];
    let mut cleanup_matched = 0;
    for (i, jj) in edges {
        if !row_used[i] && partial[jj].is_none() {
            row_used[i] = true;
            partial[jj] = Some(i);
            cleanup_matched += 1;
        }
    }
    Ok(AlmostExactOutcome {
        permutation: complete_smallest_first(&partial),
        candidate_pairs,
        cleanup_matched,
        threshold,
        index_set_len: j.len(),
    })
}

/// Computes signatures of the target community in both graphs and runs the
/// thresholded matching.
pub fn almost_exact_match(
    g: &LabeledGraph,
    g2: &LabeledGraph,
    sig_hyper: &SignatureHyper,
    hyper: &MatchHyper,
    exec: Execution,
) -> Result<AlmostExactOutcome> {
    g.partition.check_compatible(&g2.partition)?;
    hyper.validate()?;
    let sigs = compute_signatures(g, sig_hyper, exec)?;
    let sigs2 = compute_signatures(g2, sig_hyper, exec)?;
    match_signatures(
        &sigs,
        &sigs2,
        sig_hyper.index_bits(),
        sig_hyper.kprime,
        sig_hyper.ell,
        hyper,
        exec,
    )
}

/// The index set [`match_signatures`] would draw for these settings.
pub fn index_set_for(sig_hyper: &SignatureHyper, hyper: &MatchHyper) -> Result<IndexSet> {
    sample_index_set(sig_hyper.kprime, sig_hyper.ell, hyper.w, hyper.seed)
}
