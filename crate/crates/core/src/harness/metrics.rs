use crate::error::{Error, Result};
use crate::graph::{Permutation, Vertex};

/// Fraction of `domain` on which `candidate` and `truth` agree.
///
/// With `domain = None` the whole vertex range is scored. An empty domain
/// scores 1.
pub fn accuracy(
    candidate: &Permutation,
    truth: &Permutation,
    domain: Option<&[Vertex]>,
) -> Result<f64> {
    if candidate.len() != truth.len() {
        return Err(Error::arg(format!(
            "candidate covers {} vertices, truth covers {}",
            candidate.len(),
            truth.len()
        )));
    }
    let Some(domain) = domain else {
        if truth.is_empty() {
            return Ok(1.0);
        }
        return Ok(candidate.agreement(truth) as f64 / truth.len() as f64);
    };
    if let Some(&v) = domain.iter().find(|&&v| v >= truth.len()) {
        return Err(Error::arg(format!(
            "domain vertex {v} outside a permutation of size {}",
            truth.len()
        )));
    }
    if domain.is_empty() {
        return Ok(1.0);
    }
    let hits = domain
        .iter()
        .filter(|&&v| candidate.apply(v) == truth.apply(v))
        .count();
    Ok(hits as f64 / domain.len() as f64)
}
