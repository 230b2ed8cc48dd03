//! Refinement of a nearly correct matching by common-neighbor witnesses.
//!
//! Both graphs are on the same vertex range (usually one community, in local
//! indices). A matching maps vertices of `g2` to vertices of `g`. The
//! witness count of a pair `(i, i')` under `π` is
//! `|π⁻¹(N_g(i)) ∩ N_g2(i')|`.

use log::{debug, info};

use crate::assignment::{solve_lap_max, CostMatrix};
use crate::error::{Error, Result};
use crate::graph::{permutation::complete_smallest_first, Graph, Permutation};
use crate::par::{for_each_row, Execution};

/// Dense witness counts, row `i` (vertex of `g`) by column `i'` (vertex of `g2`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessMatrix {
    n: usize,
    counts: Vec<u32>,
}

impl WitnessMatrix {
    pub fn compute(g: &Graph, g2: &Graph, pi: &Permutation, exec: Execution) -> Result<Self> {
        let n = g.n();
        if g2.n() != n || pi.len() != n {
            return Err(Error::arg(format!(
                "refinement domain mismatch: graphs {} and {}, permutation {}",
                n,
                g2.n(),
                pi.len()
            )));
        }
        let mut counts = vec![0u32; n * n];
        for_each_row(exec, &mut counts, n, |i, row| {
            for &u in g.neighbors(i) {
                for &i2 in g2.neighbors(pi.apply_inverse(u)) {
                    row[i2] += 1;
                }
            }
        });
        Ok(WitnessMatrix { n, counts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, i2: usize) -> u32 {
        self.counts[i * self.n + i2]
    }

    fn to_cost_matrix(&self) -> CostMatrix {
        CostMatrix::new(self.n, self.counts.iter().map(|&c| c as f64).collect())
            .expect("witness counts are finite")
    }
}

/// `ε² p̂ n / 512`.
pub fn refinement_threshold(eps: f64, p_hat: f64, n: usize) -> f64 {
    eps * eps * p_hat * n as f64 / 512.0
}

/// One thresholded round: pairs above the threshold that are the only such
/// entry in both their row and column are fixed; every other vertex keeps
/// its previous partner when that partner is free, and the rest are paired
/// in increasing id order.
pub(crate) fn threshold_round(
    w: &WitnessMatrix,
    prev: &Permutation,
    threshold: f64,
) -> (Permutation, usize) {
    let n = w.n();
    let mut row_hits = vec![0u32; n];
    let mut col_hits = vec![0u32; n];
    for i in 0..n {
        for i2 in 0..n {
            if w.get(i, i2) as f64 >= threshold {
                row_hits[i] += 1;
                col_hits[i2] += 1;
            }
        }
    }
    let mut partial: Vec<Option<usize>> = vec![None; n];
    let mut taken = vec![false; n];
    let mut fixed = 0;
    for i in 0..n {
        if row_hits[i] != 1 {
            continue;
        }
        let i2 = (0..n)
            .find(|&i2| w.get(i, i2) as f64 >= threshold)
            .expect("row has exactly one hit");
        if col_hits[i2] == 1 {
            partial[i2] = Some(i);
            taken[i] = true;
            fixed += 1;
        }
    }
    for i2 in 0..n {
        if partial[i2].is_none() {
            let i = prev.apply(i2);
            if !taken[i] {
                partial[i2] = Some(i);
                taken[i] = true;
            }
        }
    }
    (complete_smallest_first(&partial), fixed)
}

/// Thresholded refinement over `⌈log₂ n⌉` rounds with threshold
/// `ε² p̂ n / 512`.
pub fn refine_threshold(
    g: &Graph,
    g2: &Graph,
    pi0: &Permutation,
    eps: f64,
    p_hat: f64,
    exec: Execution,
) -> Result<Permutation> {
    if eps.is_nan() || eps <= 0.0 || !p_hat.is_finite() || p_hat < 0.0 {
        return Err(Error::param(format!(
            "refinement needs eps > 0 and a density, got eps = {eps}, p = {p_hat}"
        )));
    }
    let n = g.n();
    let threshold = refinement_threshold(eps, p_hat, n);
    info!("refinement threshold eps^2 p n / 512 = {eps}^2 * {p_hat} * {n} / 512 = {threshold:.4}");
    let rounds = if n <= 1 {
        0
    } else {
        (n as f64).log2().ceil() as usize
    };
    let mut pi = pi0.clone();
    for t in 1..=rounds {
        let w = WitnessMatrix::compute(g, g2, &pi, exec)?;
        let (next, fixed) = threshold_round(&w, &pi, threshold);
        debug!("threshold refinement round {t}: {fixed} of {n} pairs fixed");
        if next == pi {
            break;
        }
        pi = next;
    }
    Ok(pi)
}

/// Refinement by repeated maximum-weight assignment on witness counts.
pub fn refine_lap(
    g: &Graph,
    g2: &Graph,
    pi0: &Permutation,
    rounds: usize,
    exec: Execution,
) -> Result<Permutation> {
    if g.n() != g2.n() || pi0.len() != g.n() {
        return Err(Error::arg("refinement domain mismatch"));
    }
    let mut pi = pi0.clone();
    for t in 1..=rounds {
        let w = WitnessMatrix::compute(g, g2, &pi, exec)?;
        let next = solve_lap_max(&w.to_cost_matrix());
        debug!(
            "assignment refinement round {t}: {} of {} pairs changed",
            g.n() - next.agreement(&pi),
            g.n()
        );
        if next == pi {
            break;
        }
        pi = next;
    }
    Ok(pi)
}
