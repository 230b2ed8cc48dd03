//! Experiment plumbing: files, parameter estimates, scoring and sweeps.

pub mod estimate;
pub mod experiment;
pub mod io;
mod metrics;

pub use estimate::{estimate_params, estimate_params_pooled, ParamEstimates};
pub use experiment::{
    replay, run_experiment, write_csv, write_csv_file, ExperimentConfig, ExperimentInput,
    GridPoint, ResultRow, CSV_HEADER, THREADS_ENV,
};
pub use io::{load_graph, load_pair, save_graph, LoadedGraph, LoadedPair};
pub use metrics::accuracy;
