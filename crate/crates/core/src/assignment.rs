//! Exact dense linear assignment.
//!
//! Shortest-augmenting-path Hungarian method with row/column potentials,
//! `O(n³)` time. Maximization is minimization of the negated matrix.

use crate::error::{Error, Result};
use crate::graph::Permutation;

/// Square matrix of finite costs, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::arg(format!(
                "cost matrix of size {n} needs {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        if let Some(x) = data.iter().position(|c| !c.is_finite()) {
            return Err(Error::arg(format!(
                "non-finite cost at ({}, {})",
                x / n.max(1),
                x % n.max(1)
            )));
        }
        Ok(CostMatrix { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::arg("cost matrix is not square"));
        }
        Self::new(n, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    pub fn negated(&self) -> CostMatrix {
        CostMatrix {
            n: self.n,
            data: self.data.iter().map(|c| -c).collect(),
        }
    }

    /// `Σ_col c[σ(col), col]`.
    pub fn cost_of(&self, sigma: &Permutation) -> f64 {
        (0..self.n).map(|col| self.get(sigma.apply(col), col)).sum()
    }
}

/// Optimal assignment with its dual certificate.
#[derive(Debug, Clone)]
pub struct LapSolution {
    /// Maps each column to its row.
    pub assignment: Permutation,
    pub cost: f64,
    /// Potentials with `row[i] + col[j] <= c[i][j]`, tight on assigned cells.
    pub row_potential: Vec<f64>,
    pub col_potential: Vec<f64>,
}

/// Minimum-cost assignment with dual potentials.
pub fn solve_lap(c: &CostMatrix) -> LapSolution {
    let n = c.n;
    if n == 0 {
        return LapSolution {
            assignment: Permutation::identity(0),
            cost: 0.0,
            row_potential: Vec::new(),
            col_potential: Vec::new(),
        };
    }
    // 1-based; index 0 is the virtual column used to start each augmentation
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![f64::INFINITY; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        minv.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            let row = &c.data[(i0 - 1) * n..i0 * n];
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = row[j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let forward: Vec<usize> = (1..=n).map(|j| row_of[j] - 1).collect();
    let assignment = Permutation::from_forward(forward).expect("Hungarian output is a bijection");
    let cost = c.cost_of(&assignment);
    LapSolution {
        assignment,
        cost,
        row_potential: u[1..].to_vec(),
        col_potential: v[1..].to_vec(),
    }
}

/// Permutation `σ` (column → row) minimizing `Σ_i c[σ(i), i]`.
pub fn solve_lap_min(c: &CostMatrix) -> Permutation {
    solve_lap(c).assignment
}

/// Permutation `σ` (column → row) maximizing `Σ_i c[σ(i), i]`.
pub fn solve_lap_max(c: &CostMatrix) -> Permutation {
    solve_lap(&c.negated()).assignment
}
