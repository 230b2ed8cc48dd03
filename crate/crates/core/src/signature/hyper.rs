use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::graph::CommunityPartition;
use crate::rng::{stream, Stream};

/// How a within-community degree enters the signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegreeTransform {
    /// `deg` itself, centered at `1 + center`.
    #[default]
    Raw,
    /// `ln(1 + deg)`, centered at `center`; for heavy-tailed degree data.
    Log,
}

/// Which node a sphere vertex joins when several nodes of the previous
/// depth reach it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParentRule {
    /// The reaching node with the smallest code. Depends only on degrees, so
    /// trees of corresponding vertices agree whatever the vertex labels.
    #[default]
    SmallestCode,
    /// The node holding the smallest-id predecessor.
    SmallestId,
}

/// Shape of the partition tree and the sparsification width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeShape {
    pub kprime: usize,
    pub ell: usize,
    /// Half the size of the sampled leaf-index set.
    pub w: usize,
}

/// Everything the tree builder needs for one target community.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureHyper {
    pub kprime: usize,
    pub ell: usize,
    /// Community whose vertices are signed (normally the smallest).
    pub target: usize,
    /// Communities used for the sign tests, one per slot.
    pub selected: Vec<usize>,
    /// Community kept out of the sign tests for the seeded stage.
    pub reserved: Option<usize>,
    pub transform: DegreeTransform,
    pub parent_rule: ParentRule,
    /// `n_k p̂` in raw mode; mean of `ln(1 + deg)` in log mode.
    pub center: f64,
    /// Variance of one leaf vertex's term: `n_k p̂ (1 - p̂)` or an estimate.
    pub unit_variance: f64,
    /// `n_a q̂_a` for each selected slot.
    pub sign_thresholds: Vec<f64>,
}

impl SignatureHyper {
    /// Hyper-parameters from known model densities.
    pub fn from_densities(
        part: &CommunityPartition,
        shape: TreeShape,
        selected: Vec<usize>,
        reserved: Option<usize>,
        p: f64,
        q: f64,
    ) -> Result<Self> {
        let target = part.smallest();
        let n_k = part.size(target) as f64;
        let sign_thresholds = selected.iter().map(|&a| part.size(a) as f64 * q).collect();
        let hyper = SignatureHyper {
            kprime: shape.kprime,
            ell: shape.ell,
            target,
            selected,
            reserved,
            transform: DegreeTransform::Raw,
            parent_rule: ParentRule::default(),
            center: n_k * p,
            unit_variance: n_k * p * (1.0 - p),
            sign_thresholds,
        };
        hyper.validate(part)?;
        Ok(hyper)
    }

    /// Number of address bits of a leaf.
    pub fn index_bits(&self) -> usize {
        self.kprime * self.ell
    }

    /// Amount subtracted from each transformed degree.
    #[inline]
    pub(crate) fn offset(&self) -> f64 {
        match self.transform {
            DegreeTransform::Raw => 1.0 + self.center,
            DegreeTransform::Log => self.center,
        }
    }

    #[inline]
    pub(crate) fn transformed(&self, deg: u32) -> f64 {
        match self.transform {
            DegreeTransform::Raw => deg as f64,
            DegreeTransform::Log => (deg as f64).ln_1p(),
        }
    }

    pub fn validate(&self, part: &CommunityPartition) -> Result<()> {
        let k = part.k();
        if self.kprime == 0 || self.ell == 0 {
            return Err(Error::param("kprime and ell must be at least 1"));
        }
        if self.index_bits() > 63 {
            return Err(Error::param(format!(
                "2^(kprime * ell) = 2^{} does not fit a 64-bit index",
                self.index_bits()
            )));
        }
        if self.target >= k {
            return Err(Error::param(format!(
                "target community {} out of range",
                self.target
            )));
        }
        if self.selected.len() != self.kprime || self.sign_thresholds.len() != self.kprime {
            return Err(Error::param(format!(
                "expected {} selected communities and thresholds, got {} and {}",
                self.kprime,
                self.selected.len(),
                self.sign_thresholds.len()
            )));
        }
        for (x, &a) in self.selected.iter().enumerate() {
            if a >= k || a == self.target || Some(a) == self.reserved {
                return Err(Error::param(format!(
                    "selected community {a} is out of range, the target, or reserved"
                )));
            }
            if self.selected[..x].contains(&a) {
                return Err(Error::param(format!("community {a} selected twice")));
            }
        }
        if let Some(r) = self.reserved {
            if r >= k || r == self.target {
                return Err(Error::param(format!("reserved community {r} invalid")));
            }
        }
        let finite = [self.center, self.unit_variance]
            .iter()
            .chain(&self.sign_thresholds)
            .all(|x| x.is_finite());
        if !finite || self.unit_variance < 0.0 {
            return Err(Error::param(
                "centering, variance and thresholds must be finite",
            ));
        }
        Ok(())
    }
}

/// Default tree shape from the size and density of the target community.
///
/// `ell = min(⌈ln n_k / (40 ln(n_k p̂))⌉, ⌈42 ln ln n_k⌉)`,
/// `kprime = ⌈1680 ln ln n_k · ln(n_k p̂) / ln n_k⌉` and `w = ⌊(ln n_k)^5⌋`,
/// then `kprime` is clamped to `k_available - 2` and the leaf space to at most
/// `n_k²` indices (shrinking `kprime` first, then `ell`).
pub fn default_hyperparams(n_k: usize, p_hat: f64, k_available: usize) -> Result<TreeShape> {
    if n_k < 16 {
        return Err(Error::param(format!(
            "n_k = {n_k} below 16; ln ln n_k undefined"
        )));
    }
    let nk = n_k as f64;
    let mean_deg = nk * p_hat;
    if mean_deg.is_nan() || mean_deg <= 1.0 {
        return Err(Error::param(format!(
            "n_k p = {mean_deg} must exceed 1 for the default tree shape"
        )));
    }
    if k_available < 3 {
        return Err(Error::param(format!(
            "{k_available} communities leave no room for a sign community"
        )));
    }
    let (ln_n, ln_ln_n, ln_deg) = (nk.ln(), nk.ln().ln(), mean_deg.ln());
    let mut ell = ((ln_n / (40.0 * ln_deg)).ceil() as usize)
        .min((42.0 * ln_ln_n).ceil() as usize)
        .max(1);
    let mut kprime = ((1680.0 * ln_ln_n * ln_deg / ln_n).ceil() as usize).clamp(1, k_available - 2);
    let w = ln_n.powi(5).floor() as usize;

    let max_bits = (2.0 * (nk).log2()).floor() as usize;
    while kprime * ell > max_bits.min(63) {
        if kprime > 1 {
            kprime -= 1;
        } else {
            ell -= 1;
        }
    }
    Ok(TreeShape {
        kprime,
        ell,
        w: w.max(1),
    })
}

/// How the sign communities are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CommunitySelection {
    /// Reserve the second-smallest community, sign with the `kprime` largest.
    #[default]
    Largest,
    /// Seeded uniform choice among the non-target communities.
    Random(u64),
}

/// Picks `(selected, reserved)` for the target (smallest) community.
pub fn select_communities(
    part: &CommunityPartition,
    kprime: usize,
    mode: CommunitySelection,
) -> Result<(Vec<usize>, usize)> {
    let k = part.k();
    if k < 3 || kprime + 2 > k {
        return Err(Error::config(format!(
            "kprime = {kprime} needs at least {} communities, found {k}",
            kprime + 2
        )));
    }
    let target = part.smallest();
    match mode {
        CommunitySelection::Largest => {
            let reserved = k - 2;
            Ok(((0..kprime).collect(), reserved))
        }
        CommunitySelection::Random(seed) => {
            let mut pool: Vec<usize> = (0..k).filter(|&a| a != target).collect();
            pool.shuffle(&mut stream(seed, Stream::Selection));
            let reserved = pool[0];
            let mut selected = pool[1..=kprime].to_vec();
            selected.sort_unstable();
            Ok((selected, reserved))
        }
    }
}
