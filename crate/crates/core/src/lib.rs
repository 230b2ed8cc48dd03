//! Exact matching of correlated stochastic block model graphs.
//!
//! Two graphs are sampled from a common SBM parent by independent edge
//! deletion, and one is relabeled by a hidden permutation. Matching proceeds
//! community by community: the smallest community is matched from
//! partition-tree degree signatures, refined with common-neighbor witnesses,
//! and the remaining communities are recovered by seeded matching.
//!
//! ```
//! use csbm::matcher::{run_pair, ParamSource, PipelineConfig};
//! use csbm::sbm::{generate_correlated_pair, PairOptions, SbmParams};
//!
//! let params = SbmParams::balanced(480, 4, 0.1, 0.1 / 3.0, 0.0);
//! let pair = generate_correlated_pair(&params, 7, PairOptions::default()).unwrap();
//! let cfg = PipelineConfig::new(ParamSource::Known { p: 0.1, q: 0.1 / 3.0 }, 7).with_shape(2, 2);
//! let result = run_pair(&pair, &cfg).unwrap();
//! assert!(result.permutation.is_bijection());
//! ```

pub mod assignment;
pub mod error;
pub mod graph;
pub mod harness;
pub mod matcher;
pub mod par;
pub mod rng;
pub mod sbm;
pub mod signature;

pub use error::{Error, Result};
pub use graph::{CommunityPartition, Graph, LabeledGraph, Permutation, Vertex};
pub use par::Execution;
