use std::collections::BTreeMap;

use super::{ParentRule, SignatureHyper};
use crate::error::{Error, Result};
use crate::graph::{CommunityDegrees, LabeledGraph, Vertex};

/// Partition tree rooted at one vertex of the target community.
///
/// `levels[d]` maps the encoded sign prefix of depth `d` (bits
/// `0..d * kprime`) to the vertices of that node, each list sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionTree {
    pub root: Vertex,
    pub levels: Vec<BTreeMap<u64, Vec<Vertex>>>,
}

impl PartitionTree {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn leaves(&self) -> &BTreeMap<u64, Vec<Vertex>> {
        self.levels
            .last()
            .expect("a tree has at least its root level")
    }

    /// Vertices of the node addressed by `code` at depth `d` (empty if absent).
    pub fn node(&self, d: usize, code: u64) -> &[Vertex] {
        self.levels[d].get(&code).map_or(&[], Vec::as_slice)
    }
}

/// Sign bits of `j` for the selected communities.
#[inline]
pub(crate) fn sign_bits(degrees: &CommunityDegrees, hyper: &SignatureHyper, j: Vertex) -> u64 {
    hyper
        .selected
        .iter()
        .zip(&hyper.sign_thresholds)
        .enumerate()
        .fold(0u64, |acc, (slot, (&a, &thr))| {
            if degrees.get(j, a) as f64 - thr >= 0.0 {
                acc | (1 << slot)
            } else {
                acc
            }
        })
}

/// Grows the tree of `root` by BFS inside the target community.
///
/// A vertex first reached at depth `r + 1` joins one child (under its sign
/// bits) of a node holding one of its predecessors at depth `r`, so every
/// depth's nodes stay disjoint. The frontier is scanned in the order given
/// by the parent rule and the first predecessor to reach a vertex wins.
pub(crate) fn grow_tree(
    lg: &LabeledGraph,
    degrees: &CommunityDegrees,
    hyper: &SignatureHyper,
    root: Vertex,
) -> PartitionTree {
    let g = &lg.graph;
    let part = &lg.partition;
    let target = hyper.target;
    let mut visited = vec![false; g.n()];
    visited[root] = true;

    let mut levels = Vec::with_capacity(hyper.ell + 1);
    levels.push(BTreeMap::from([(0u64, vec![root])]));
    let mut frontier: Vec<(Vertex, u64)> = vec![(root, 0)];

    for r in 0..hyper.ell {
        match hyper.parent_rule {
            ParentRule::SmallestCode => frontier.sort_unstable_by_key(|&(v, code)| (code, v)),
            ParentRule::SmallestId => frontier.sort_unstable_by_key(|&(v, _)| v),
        }
        let shift = r * hyper.kprime;
        let mut next = Vec::new();
        for &(u, code) in &frontier {
            for &j in g.neighbors(u) {
                if visited[j] || part.label(j) != target {
                    continue;
                }
                visited[j] = true;
                next.push((j, code | (sign_bits(degrees, hyper, j) << shift)));
            }
        }
        let mut level: BTreeMap<u64, Vec<Vertex>> = BTreeMap::new();
        for &(j, code) in &next {
            level.entry(code).or_default().push(j);
        }
        for verts in level.values_mut() {
            verts.sort_unstable();
        }
        levels.push(level);
        frontier = next;
    }
    PartitionTree { root, levels }
}

/// Builds the partition tree of `root`, which must lie in the target community.
pub fn build_partition_tree(
    lg: &LabeledGraph,
    hyper: &SignatureHyper,
    root: Vertex,
) -> Result<PartitionTree> {
    hyper.validate(&lg.partition)?;
    if root >= lg.n() || lg.partition.label(root) != hyper.target {
        return Err(Error::arg(format!(
            "root {root} is not in target community {}",
            hyper.target
        )));
    }
    let degrees = CommunityDegrees::new(&lg.graph, &lg.partition);
    Ok(grow_tree(lg, &degrees, hyper, root))
}
