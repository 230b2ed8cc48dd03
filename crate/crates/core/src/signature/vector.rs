use super::tree::grow_tree;
use super::{PartitionTree, SignatureHyper};
use crate::error::{Error, Result};
use crate::graph::{CommunityDegrees, LabeledGraph};
use crate::par::{map_range, Execution};

/// One nonempty leaf of a signature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafEntry {
    pub index: u64,
    /// `f` at this leaf: sum of centered degrees.
    pub f: f64,
    /// `v` at this leaf: `unit_variance * size`.
    pub v: f64,
    pub size: u32,
}

/// Signature `f` and variance `v` of one vertex over `2^index_bits` leaves.
///
/// Only nonempty leaves are stored, sorted by index; every absent leaf has
/// `f = v = 0` and size zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureSet {
    pub index_bits: usize,
    pub entries: Vec<LeafEntry>,
}

impl SignatureSet {
    pub fn dim(&self) -> u64 {
        1u64 << self.index_bits
    }

    /// Entry at `index`, if that leaf is nonempty.
    pub fn get(&self, index: u64) -> Option<&LeafEntry> {
        self.entries
            .binary_search_by_key(&index, |e| e.index)
            .ok()
            .map(|x| &self.entries[x])
    }

    /// Dense `(f, v, leaf_sizes)` vectors. Refuses spaces above `2^24`.
    pub fn to_dense(&self) -> Result<(Vec<f64>, Vec<f64>, Vec<u32>)> {
        if self.index_bits > 24 {
            return Err(Error::arg(format!(
                "refusing to densify 2^{} leaves",
                self.index_bits
            )));
        }
        let dim = self.dim() as usize;
        let (mut f, mut v, mut sizes) = (vec![0.0; dim], vec![0.0; dim], vec![0u32; dim]);
        for e in &self.entries {
            let x = e.index as usize;
            f[x] = e.f;
            v[x] = e.v;
            sizes[x] = e.size;
        }
        Ok((f, v, sizes))
    }
}

/// Signature of a built tree.
pub fn compute_signature(
    tree: &PartitionTree,
    lg: &LabeledGraph,
    hyper: &SignatureHyper,
) -> Result<SignatureSet> {
    if tree.depth() != hyper.ell {
        return Err(Error::arg(format!(
            "tree depth {} differs from ell = {}",
            tree.depth(),
            hyper.ell
        )));
    }
    let degrees = CommunityDegrees::new(&lg.graph, &lg.partition);
    Ok(signature_of(tree, &degrees, hyper))
}

pub(crate) fn signature_of(
    tree: &PartitionTree,
    degrees: &CommunityDegrees,
    hyper: &SignatureHyper,
) -> SignatureSet {
    let offset = hyper.offset();
    let entries = tree
        .leaves()
        .iter()
        .map(|(&index, verts)| {
            let f = verts
                .iter()
                .map(|&j| hyper.transformed(degrees.get(j, hyper.target)) - offset)
                .sum();
            let size = verts.len() as u32;
            LeafEntry {
                index,
                f,
                v: hyper.unit_variance * size as f64,
                size,
            }
        })
        .collect();
    SignatureSet {
        index_bits: hyper.index_bits(),
        entries,
    }
}

/// Signatures of every target-community vertex, in member order.
pub fn compute_signatures(
    lg: &LabeledGraph,
    hyper: &SignatureHyper,
    exec: Execution,
) -> Result<Vec<SignatureSet>> {
    hyper.validate(&lg.partition)?;
    let degrees = CommunityDegrees::new(&lg.graph, &lg.partition);
    let members = lg.partition.members(hyper.target);
    Ok(map_range(exec, members.len(), |x| {
        let tree = grow_tree(lg, &degrees, hyper, members[x]);
        signature_of(&tree, &degrees, hyper)
    }))
}
