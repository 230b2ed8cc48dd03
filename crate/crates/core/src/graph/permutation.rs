use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Bijection on `0..n` with constant-time forward and inverse lookup.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        let forward: Vec<usize> = (0..n).collect();
        Permutation {
            inverse: forward.clone(),
            forward,
        }
    }

    /// Validates `forward` as a bijection and builds the inverse table.
    pub fn from_forward(forward: Vec<usize>) -> Result<Self> {
        let n = forward.len();
        let mut inverse = vec![usize::MAX; n];
        for (i, &t) in forward.iter().enumerate() {
            if t >= n {
                return Err(Error::arg(format!("image {t} out of range for size {n}")));
            }
            if inverse[t] != usize::MAX {
                return Err(Error::arg(format!("image {t} hit twice; not a bijection")));
            }
            inverse[t] = i;
        }
        Ok(Permutation { forward, inverse })
    }

    /// Uniformly random permutation.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut forward: Vec<usize> = (0..n).collect();
        forward.shuffle(rng);
        Self::from_forward(forward).expect("shuffle of identity is a bijection")
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.forward[i]
    }

    #[inline]
    pub fn apply_inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::arg("composing permutations of different sizes"));
        }
        Self::from_forward(self.forward.iter().map(|&x| other.apply(x)).collect())
    }

    /// Re-checks that the two tables are mutually inverse bijections.
    pub fn is_bijection(&self) -> bool {
        let n = self.len();
        self.inverse.len() == n
            && (0..n).all(|i| {
                let f = self.forward[i];
                f < n && self.inverse[f] == i && self.forward[self.inverse[i]] == i
            })
    }

    /// Number of fixed points shared with `other` over all indices.
    pub fn agreement(&self, other: &Permutation) -> usize {
        self.forward
            .iter()
            .zip(&other.forward)
            .filter(|(a, b)| a == b)
            .count()
    }
}

/// Completes a partial matching `target -> source` into a bijection.
///
/// `partial[j]` is `Some(i)` when `j` is already matched to `i`; the matched
/// images must be distinct. Unmatched positions are paired with unused images
/// in increasing order of both.
pub(crate) fn complete_smallest_first(partial: &[Option<usize>]) -> Permutation {
    let n = partial.len();
    let mut used = vec![false; n];
    for i in partial.iter().flatten() {
        debug_assert!(!used[*i], "partial matching is not injective");
        used[*i] = true;
    }
    let mut free = (0..n).filter(|&i| !used[i]);
    let forward = partial
        .iter()
        .map(|m| match m {
            Some(i) => *i,
            None => free.next().expect("as many free images as unmatched slots"),
        })
        .collect();
    Permutation::from_forward(forward).expect("completion is a bijection")
}
