use rand::seq::index;

use crate::error::{Error, Result};
use crate::par::{for_each_row, Execution};
use crate::rng::{stream, Stream};
use crate::signature::SignatureSet;

/// Leaf indices over which two signatures are compared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexSet {
    /// Every index in `0..2^bits`.
    Full { bits: usize },
    /// A sorted subset of `0..2^bits`.
    Sampled { bits: usize, indices: Vec<u64> },
}

impl IndexSet {
    pub fn len(&self) -> u64 {
        match self {
            IndexSet::Full { bits } => 1u64 << bits,
            IndexSet::Sampled { indices, .. } => indices.len() as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn contains(&self, s: u64) -> bool {
        match self {
            IndexSet::Full { bits } => s >> bits == 0,
            IndexSet::Sampled { indices, .. } => indices.binary_search(&s).is_ok(),
        }
    }

    /// Materialized indices (refuses full spaces above `2^24`).
    pub fn to_vec(&self) -> Result<Vec<u64>> {
        match self {
            IndexSet::Full { bits } if *bits <= 24 => Ok((0..1u64 << bits).collect()),
            IndexSet::Full { bits } => {
                Err(Error::arg(format!("refusing to list 2^{bits} indices")))
            }
            IndexSet::Sampled { indices, .. } => Ok(indices.clone()),
        }
    }
}

/// Uniform subset of `min(2w, 2^(kprime·ell))` distinct leaf indices.
pub fn sample_index_set(kprime: usize, ell: usize, w: usize, seed: u64) -> Result<IndexSet> {
    let bits = kprime * ell;
    if bits == 0 || bits > 63 {
        return Err(Error::arg(format!(
            "kprime * ell = {bits} must lie in 1..=63"
        )));
    }
    let dim = 1u64 << bits;
    let want = 2u64.saturating_mul(w as u64);
    if want >= dim {
        return Ok(IndexSet::Full { bits });
    }
    let mut rng = stream(seed, Stream::IndexSet);
    let mut indices: Vec<u64> = index::sample(&mut rng, dim as usize, want as usize)
        .into_iter()
        .map(|x| x as u64)
        .collect();
    indices.sort_unstable();
    Ok(IndexSet::Sampled { bits, indices })
}

/// `Σ_{s∈J} (f[s] - f2[s])² / (v[s] + v2[s])`, with zero-variance terms
/// contributing nothing.
pub fn normalized_distance(
    f: &[f64],
    v: &[f64],
    f2: &[f64],
    v2: &[f64],
    j: &[usize],
) -> Result<f64> {
    let len = f.len();
    if v.len() != len || f2.len() != len || v2.len() != len {
        return Err(Error::arg("signature vectors differ in length"));
    }
    if let Some(&bad) = j.iter().find(|&&s| s >= len) {
        return Err(Error::arg(format!(
            "index {bad} outside vectors of length {len}"
        )));
    }
    Ok(j.iter().map(|&s| term(f[s], v[s], f2[s], v2[s])).sum())
}

#[inline]
fn term(f: f64, v: f64, f2: f64, v2: f64) -> f64 {
    let var = v + v2;
    if var > 0.0 {
        let d = f - f2;
        d * d / var
    } else {
        0.0
    }
}

impl SignatureSet {
    /// Normalized distance to `other` restricted to `j`.
    ///
    /// Leaves empty on both sides contribute zero, so only the union of the
    /// two sparse supports is visited.
    pub fn distance(&self, other: &SignatureSet, j: &IndexSet) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut x, mut y) = (0, 0);
        let mut total = 0.0;
        while x < a.len() || y < b.len() {
            let (s, t) = match (a.get(x), b.get(y)) {
                (Some(ea), Some(eb)) if ea.index == eb.index => {
                    x += 1;
                    y += 1;
                    (ea.index, term(ea.f, ea.v, eb.f, eb.v))
                }
                (Some(ea), Some(eb)) if ea.index < eb.index => {
                    x += 1;
                    (ea.index, term(ea.f, ea.v, 0.0, 0.0))
                }
                (Some(ea), None) => {
                    x += 1;
                    (ea.index, term(ea.f, ea.v, 0.0, 0.0))
                }
                (_, Some(eb)) => {
                    y += 1;
                    (eb.index, term(0.0, 0.0, eb.f, eb.v))
                }
                (None, None) => unreachable!(),
            };
            if j.contains(s) {
                total += t;
            }
        }
        total
    }
}

/// `n × n` matrix of normalized distances between signatures of the two graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Distance between vertex `i` of the first graph and `j` of the second.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_cost_matrix(self) -> crate::assignment::CostMatrix {
        crate::assignment::CostMatrix::new(self.n, self.data)
            .expect("similarity entries are finite")
    }
}

/// Full-index-space distances `S[i][j]` between `sigs[i]` and `sigs2[j]`.
pub fn build_similarity_matrix(
    sigs: &[SignatureSet],
    sigs2: &[SignatureSet],
    exec: Execution,
) -> Result<SimilarityMatrix> {
    let n = sigs.len();
    if sigs2.len() != n {
        return Err(Error::arg(format!(
            "signature counts differ: {n} vs {}",
            sigs2.len()
        )));
    }
    let Some(bits) = sigs.first().map(|s| s.index_bits) else {
        return Ok(SimilarityMatrix {
            n: 0,
            data: Vec::new(),
        });
    };
    if sigs.iter().chain(sigs2).any(|s| s.index_bits != bits) {
        return Err(Error::arg("signatures use different leaf spaces"));
    }
    let full = IndexSet::Full { bits };
    let mut data = vec![0.0; n * n];
    for_each_row(exec, &mut data, n, |i, row| {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = sigs[i].distance(&sigs2[j], &full);
        }
    });
    Ok(SimilarityMatrix { n, data })
}
