//! Extending a known matching of one community to another.
//!
//! Seeds are a bijection on community `s` (local index in the second graph
//! → local index in the first). For a target community `t`, each vertex is
//! summarized by the set of seeds it reaches, and candidate pairs are scored
//! by the overlap of those sets.

use std::sync::atomic::{AtomicBool, Ordering};

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::graph::{permutation::complete_smallest_first, LabeledGraph, Permutation, Vertex};
use crate::par::{for_each_row, map_range, Execution};

/// Fixed-width bitset over seed indices.
#[derive(Debug, Clone, PartialEq, Eq)]
struct SeedSet {
    words: Vec<u64>,
}

impl SeedSet {
    fn new(n: usize) -> Self {
        SeedSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    #[inline]
    fn insert(&mut self, x: usize) {
        self.words[x / 64] |= 1 << (x % 64);
    }

    #[inline]
    fn overlap(&self, other: &SeedSet) -> u32 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }
}

/// Dense pair scores, row `i` (first graph) by column `i'` (second graph),
/// both local indices of the target community.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedWeights {
    n: usize,
    counts: Vec<u32>,
}

impl SeedWeights {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, i2: usize) -> u32 {
        self.counts[i * self.n + i2]
    }

    pub fn max(&self) -> u32 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    #[cfg(test)]
    pub(crate) fn from_counts(n: usize, counts: Vec<u32>) -> Self {
        assert_eq!(counts.len(), n * n);
        SeedWeights { n, counts }
    }
}

fn check_seed_args(
    g: &LabeledGraph,
    g2: &LabeledGraph,
    seeds: &Permutation,
    s: usize,
    t: usize,
) -> Result<()> {
    g.partition.check_compatible(&g2.partition)?;
    let k = g.partition.k();
    if s >= k || t >= k || s == t {
        return Err(Error::arg(format!(
            "seed community {s} and target {t} must be distinct indices below {k}"
        )));
    }
    if seeds.len() != g.partition.size(s) || !seeds.is_bijection() {
        return Err(Error::arg(format!(
            "seeds must be a bijection on community {s} ({} vertices)",
            g.partition.size(s)
        )));
    }
    Ok(())
}

/// Seeds (as second-graph local indices) adjacent to `v` in the first graph.
fn seeds_adjacent_first(
    g: &LabeledGraph,
    seeds: &Permutation,
    s: usize,
    v: Vertex,
    set: &mut SeedSet,
) {
    for &y in g.graph.neighbors(v) {
        if g.partition.label(y) == s {
            set.insert(seeds.apply_inverse(g.partition.local_index(y)));
        }
    }
}

fn seeds_adjacent_second(g2: &LabeledGraph, s: usize, v: Vertex, set: &mut SeedSet) {
    for &y in g2.graph.neighbors(v) {
        if g2.partition.label(y) == s {
            set.insert(g2.partition.local_index(y));
        }
    }
}

fn overlap_weights(first: &[SeedSet], second: &[SeedSet], exec: Execution) -> SeedWeights {
    let n = first.len();
    let mut counts = vec![0u32; n * n];
    for_each_row(exec, &mut counts, n, |i, row| {
        for (i2, cell) in row.iter_mut().enumerate() {
            *cell = first[i].overlap(&second[i2]);
        }
    });
    SeedWeights { n, counts }
}

/// Two-hop seed counts: `w(i, i')` is the number of seeds `j` such that some
/// `t`-neighbor of `i` is adjacent to `π_s(j)` in the first graph and some
/// `t`-neighbor of `i'` is adjacent to `j` in the second.
pub fn two_hop_weights(
    g: &LabeledGraph,
    g2: &LabeledGraph,
    seeds: &Permutation,
    s: usize,
    t: usize,
    exec: Execution,
) -> Result<SeedWeights> {
    check_seed_args(g, g2, seeds, s, t)?;
    let n_s = g.partition.size(s);
    let first = map_range(exec, g.partition.size(t), |x| {
        let mut set = SeedSet::new(n_s);
        let i = g.partition.members(t)[x];
        for &z in g.graph.neighbors(i) {
            if g.partition.label(z) == t {
                seeds_adjacent_first(g, seeds, s, z, &mut set);
            }
        }
        set
    });
    let second = map_range(exec, g2.partition.size(t), |x| {
        let mut set = SeedSet::new(n_s);
        let i2 = g2.partition.members(t)[x];
        for &z in g2.graph.neighbors(i2) {
            if g2.partition.label(z) == t {
                seeds_adjacent_second(g2, s, z, &mut set);
            }
        }
        set
    });
    Ok(overlap_weights(&first, &second, exec))
}

/// One-hop seed counts: seeds `j` with `π_s(j) ~ i` and `j ~ i'`.
pub fn one_hop_weights(
    g: &LabeledGraph,
    g2: &LabeledGraph,
    seeds: &Permutation,
    s: usize,
    t: usize,
    exec: Execution,
) -> Result<SeedWeights> {
    check_seed_args(g, g2, seeds, s, t)?;
    let n_s = g.partition.size(s);
    let first = map_range(exec, g.partition.size(t), |x| {
        let mut set = SeedSet::new(n_s);
        seeds_adjacent_first(g, seeds, s, g.partition.members(t)[x], &mut set);
        set
    });
    let second = map_range(exec, g2.partition.size(t), |x| {
        let mut set = SeedSet::new(n_s);
        seeds_adjacent_second(g2, s, g2.partition.members(t)[x], &mut set);
        set
    });
    Ok(overlap_weights(&first, &second, exec))
}

/// Accepts pairs in decreasing weight (ties: smaller `i`, then smaller `i'`)
/// when both ends are free and the weight reaches `threshold`; the rest is
/// paired in increasing id order.
pub(crate) fn resolve_by_weight(w: &SeedWeights, threshold: f64) -> (Permutation, usize) {
    let n = w.n();
    let mut pairs: Vec<(u32, usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |i2| (i, i2)))
        .filter_map(|(i, i2)| {
            let c = w.get(i, i2);
            (c > 0 && c as f64 >= threshold).then_some((c, i, i2))
        })
        .collect();
    pairs.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut taken = vec![false; n];
    let mut partial = vec![None; n];
    let mut matched = 0;
    for (_, i, i2) in pairs {
        if !taken[i] && partial[i2].is_none() {
            taken[i] = true;
            partial[i2] = Some(i);
            matched += 1;
        }
    }
    (complete_smallest_first(&partial), matched)
}

/// `n_t n_s p q / 8`.
pub fn seeded_threshold(n_t: usize, n_s: usize, p: f64, q: f64) -> f64 {
    n_t as f64 * n_s as f64 * p * q / 8.0
}

/// Two-hop seeded matching of community `t` from seeds on community `s`.
///
/// Pairs reaching `n_t n_s p̂ q̂ / 8` common seeds are matched; when one vertex
/// qualifies with several partners the heavier pair wins.
#[allow(clippy::too_many_arguments)]
pub fn seeded_match(
    g: &LabeledGraph,
    g2: &LabeledGraph,
    seeds: &Permutation,
    s: usize,
    t: usize,
    p_hat: f64,
    q_hat: f64,
    exec: Execution,
) -> Result<Permutation> {
    let w = two_hop_weights(g, g2, seeds, s, t, exec)?;
    let (n_t, n_s) = (g.partition.size(t), g.partition.size(s));
    if p_hat > 1.0 / 256.0 || n_t as f64 * p_hat * q_hat > 1.0 / 256.0 {
        // desk-scale runs are almost always outside this regime; say it once
        static WARNED: AtomicBool = AtomicBool::new(false);
        let msg = format!(
            "seeded matching of community {t} outside the guaranteed regime \
             (p = {p_hat:.4}, n_t p q = {:.4}; both should be at most 1/256)",
            n_t as f64 * p_hat * q_hat
        );
        if WARNED.swap(true, Ordering::Relaxed) {
            debug!("{msg}");
        } else {
            warn!("{msg}");
        }
    }
    let threshold = seeded_threshold(n_t, n_s, p_hat, q_hat);
    Ok(resolve_by_weight(&w, threshold).0)
}

/// Greedy one-hop seeded matching: repeatedly match the remaining pair with
/// the most common seeds.
pub fn seeded_match_greedy(
    g: &LabeledGraph,
    g2: &LabeledGraph,
    seeds: &Permutation,
    s: usize,
    t: usize,
    exec: Execution,
) -> Result<Permutation> {
    let w = one_hop_weights(g, g2, seeds, s, t, exec)?;
    Ok(resolve_by_weight(&w, 0.0).0)
}
