//! Community-aware partition trees and vertex signatures.
//!
//! For every vertex `i` of the target (smallest) community a depth-`ell`
//! tree is grown by BFS inside that community. Each newly reached vertex is
//! routed to one of `2^kprime` children according to the signs of its
//! degrees into `kprime` selected communities, measured against per-community
//! thresholds. Leaves at depth `ell` are addressed by the concatenated sign
//! bits, and the signature of `i` sums the centered within-community degrees
//! of each leaf's vertices.

mod hyper;
mod tree;
mod vector;

pub use hyper::{
    default_hyperparams, select_communities, CommunitySelection, DegreeTransform, ParentRule,
    SignatureHyper, TreeShape,
};
pub use tree::{build_partition_tree, PartitionTree};
pub use vector::{compute_signature, compute_signatures, LeafEntry, SignatureSet};

use crate::error::{Error, Result};

/// Outcome of one sign test: `Sign(x) = +1` iff `x >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Neg,
    Pos,
}

impl Sign {
    #[inline]
    pub fn of(x: f64) -> Sign {
        if x >= 0.0 {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Sign::Neg => -1,
            Sign::Pos => 1,
        }
    }
}

/// Packs a depth-major sign string into a leaf index.
///
/// `signs[(r - 1) * kprime + (a - 1)]` is the sign for depth `r` and slot `a`;
/// bit `(r - 1) * kprime + (a - 1)` of the result is set iff that sign is `+1`.
pub fn encode_leaf_index(signs: &[Sign], kprime: usize, ell: usize) -> Result<u64> {
    let len = kprime * ell;
    if signs.len() != len {
        return Err(Error::arg(format!(
            "sign string has length {}, expected kprime * ell = {len}",
            signs.len()
        )));
    }
    if len > 63 {
        return Err(Error::arg(format!("kprime * ell = {len} exceeds 63 bits")));
    }
    Ok(signs
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == Sign::Pos)
        .fold(0u64, |acc, (b, _)| acc | (1 << b)))
}

/// Inverse of [`encode_leaf_index`].
pub fn decode_leaf_index(index: u64, kprime: usize, ell: usize) -> Result<Vec<Sign>> {
    let len = kprime * ell;
    if len > 63 || (len < 64 && index >> len != 0) {
        return Err(Error::arg(format!(
            "index {index} does not fit in {len} sign bits"
        )));
    }
    Ok((0..len)
        .map(|b| {
            if index >> b & 1 == 1 {
                Sign::Pos
            } else {
                Sign::Neg
            }
        })
        .collect())
}
