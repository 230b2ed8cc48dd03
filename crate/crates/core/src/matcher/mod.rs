//! Recovering the hidden vertex correspondence.
//!
//! The pipeline matches the smallest community from partition-tree
//! signatures, refines that matching with common-neighbor witnesses, and then
//! propagates it community by community with seeded matching.

mod almost_exact;
mod distance;
mod pipeline;
mod refine;
mod seeded;

pub use almost_exact::{almost_exact_match, index_set_for, match_signatures, AlmostExactOutcome};
pub use distance::{
    build_similarity_matrix, normalized_distance, sample_index_set, IndexSet, SimilarityMatrix,
};
pub use pipeline::{
    full_pipeline, local_truth, run_pair, MatchResult, ParamSource, PipelineConfig, Refinement,
    SeedMode, Stage1Route, StageRecord,
};
pub use refine::{refine_lap, refine_threshold, refinement_threshold, WitnessMatrix};
pub use seeded::{
    one_hop_weights, seeded_match, seeded_match_greedy, seeded_threshold, two_hop_weights,
    SeedWeights,
};

use crate::error::{Error, Result};

/// Tunables of the matching stages.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchHyper {
    /// Half the size of the sampled leaf-index set `J`.
    pub w: usize,
    /// Relative slack below `|J|` for the distance threshold.
    pub threshold_slack: f64,
    /// `ε` of the thresholded refinement.
    pub epsilon_refine: f64,
    /// Rounds of assignment-based refinement.
    pub refine_rounds: usize,
    pub seed_mode: SeedMode,
    /// Seed for the index-set and cleanup streams.
    pub seed: u64,
}

impl MatchHyper {
    /// `w = ⌊(ln n_k)^5⌋`, slack `1/√(ln n_k)`, `ε = 0.3`, 16 assignment rounds.
    pub fn for_community_size(n_k: usize, seed: u64) -> Self {
        let ln = (n_k.max(3) as f64).ln();
        MatchHyper {
            w: (ln.powi(5).floor() as usize).max(1),
            threshold_slack: 1.0 / ln.sqrt(),
            epsilon_refine: 0.3,
            refine_rounds: 16,
            seed_mode: SeedMode::Theory,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.w == 0 {
            return Err(Error::param("w must be at least 1"));
        }
        if !(self.threshold_slack > 0.0 && self.threshold_slack < 1.0) {
            return Err(Error::param(format!(
                "threshold slack {} not in (0, 1)",
                self.threshold_slack
            )));
        }
        if !(self.epsilon_refine > 0.0 && self.epsilon_refine.is_finite()) {
            return Err(Error::param(format!(
                "refinement epsilon {} must be positive",
                self.epsilon_refine
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_community_size() {
        let h = MatchHyper::for_community_size(300, 0);
        let ln = 300f64.ln();
        assert_eq!(h.w, ln.powi(5).floor() as usize);
        assert!((h.threshold_slack - 1.0 / ln.sqrt()).abs() < 1e-15);
        assert!(h.validate().is_ok());
        let mut bad = h.clone();
        bad.threshold_slack = 1.0;
        assert!(bad.validate().is_err());
    }
}
