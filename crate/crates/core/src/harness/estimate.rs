//! Degree statistics standing in for unknown model parameters.

use crate::error::{Error, Result};
use crate::graph::{CommunityDegrees, LabeledGraph};

/// Per-community degree statistics pooled over one or more graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamEstimates {
    pub sizes: Vec<usize>,
    /// Median within-community degree of each community (`n_a p̂_a`).
    pub intra_median: Vec<f64>,
    /// `cross_median[a][b]`: median degree from `C_a` into `C_b` (`n_b q̂_ab`).
    pub cross_median: Vec<Vec<f64>>,
    /// Sample variance of within-community degrees (`n_a p̂ (1 - p̂)`).
    pub intra_variance: Vec<f64>,
    /// Mean, median and variance of `ln(1 + deg)` within each community.
    pub log_intra_mean: Vec<f64>,
    pub log_intra_median: Vec<f64>,
    pub log_intra_variance: Vec<f64>,
}

impl ParamEstimates {
    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn p_hat(&self, a: usize) -> f64 {
        self.intra_median[a] / self.sizes[a] as f64
    }

    /// Density of edges from `C_a` into `C_b`.
    pub fn q_hat(&self, a: usize, b: usize) -> f64 {
        self.cross_median[a][b] / self.sizes[b] as f64
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_unstable_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Unbiased sample variance; zero for fewer than two values.
pub fn sample_variance(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mu = mean(values);
    values.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (values.len() - 1) as f64
}

/// Estimates for a single graph.
pub fn estimate_params(lg: &LabeledGraph) -> Result<ParamEstimates> {
    estimate_params_pooled(&[lg])
}

/// Estimates from the degree samples of several graphs sharing community sizes.
pub fn estimate_params_pooled(graphs: &[&LabeledGraph]) -> Result<ParamEstimates> {
    let first = graphs
        .first()
        .ok_or_else(|| Error::arg("no graphs to estimate from"))?;
    let sizes = first.partition.sizes();
    let k = sizes.len();
    if let Some(a) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::arg(format!("community {a} is empty")));
    }
    for lg in &graphs[1..] {
        first.partition.check_compatible(&lg.partition)?;
    }

    // samples[a][b]: degrees from members of a into b
    let mut samples = vec![vec![Vec::new(); k]; k];
    for lg in graphs {
        let table = CommunityDegrees::new(&lg.graph, &lg.partition);
        for a in 0..k {
            for &v in lg.partition.members(a) {
                for (b, bucket) in samples[a].iter_mut().enumerate() {
                    bucket.push(table.get(v, b) as f64);
                }
            }
        }
    }

    let mut est = ParamEstimates {
        sizes,
        intra_median: Vec::with_capacity(k),
        cross_median: Vec::with_capacity(k),
        intra_variance: Vec::with_capacity(k),
        log_intra_mean: Vec::with_capacity(k),
        log_intra_median: Vec::with_capacity(k),
        log_intra_variance: Vec::with_capacity(k),
    };
    for (a, row) in samples.iter_mut().enumerate() {
        let intra = row[a].clone();
        let mut logs: Vec<f64> = intra.iter().map(|d| d.ln_1p()).collect();
        est.intra_variance.push(sample_variance(&intra));
        est.log_intra_mean.push(mean(&logs));
        est.log_intra_variance.push(sample_variance(&logs));
        est.log_intra_median.push(median(&mut logs));
        est.cross_median
            .push(row.iter_mut().map(|bucket| median(bucket)).collect());
        est.intra_median.push(est.cross_median[a][a]);
    }
    Ok(est)
}
