use std::collections::BTreeMap;

use super::Vertex;
use crate::error::{Error, Result};

/// Assignment of vertices to `k` disjoint communities.
///
/// Communities are re-indexed at construction so sizes are non-increasing:
/// index `0` is the largest and index `k - 1` the smallest. Ties are broken by
/// the original label's ordering. The original labels are kept for I/O.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityPartition {
    labels: Vec<usize>,
    members: Vec<Vec<Vertex>>,
    /// Position of each vertex inside its community's member list.
    local: Vec<usize>,
    original: Vec<String>,
}

impl CommunityPartition {
    /// Builds a partition from one raw label per vertex.
    pub fn from_labels<L>(raw: &[L]) -> Self
    where
        L: Ord + Clone + ToString,
    {
        let mut groups: BTreeMap<L, Vec<Vertex>> = BTreeMap::new();
        for (v, l) in raw.iter().enumerate() {
            groups.entry(l.clone()).or_default().push(v);
        }
        let mut ordered: Vec<(L, Vec<Vertex>)> = groups.into_iter().collect();
        // stable sort keeps the label order among equal sizes
        ordered.sort_by_key(|(_, members)| std::cmp::Reverse(members.len()));

        let mut labels = vec![0; raw.len()];
        let mut local = vec![0; raw.len()];
        let mut members = Vec::with_capacity(ordered.len());
        let mut original = Vec::with_capacity(ordered.len());
        for (a, (label, verts)) in ordered.into_iter().enumerate() {
            for (x, &v) in verts.iter().enumerate() {
                labels[v] = a;
                local[v] = x;
            }
            members.push(verts);
            original.push(label.to_string());
        }
        CommunityPartition {
            labels,
            members,
            local,
            original,
        }
    }

    /// Partition with contiguous blocks of the given sizes, labelled by block
    /// position.
    pub fn from_sizes(sizes: &[usize]) -> Self {
        let raw: Vec<usize> = sizes
            .iter()
            .enumerate()
            .flat_map(|(a, &s)| std::iter::repeat_n(a, s))
            .collect();
        Self::from_labels(&raw)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn label(&self, v: Vertex) -> usize {
        self.labels[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Sorted vertices of community `a`.
    pub fn members(&self, a: usize) -> &[Vertex] {
        &self.members[a]
    }

    pub fn size(&self, a: usize) -> usize {
        self.members[a].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    /// Index of the smallest community (always the last one).
    pub fn smallest(&self) -> usize {
        self.k().saturating_sub(1)
    }

    /// Position of `v` within `members(label(v))`.
    #[inline]
    pub fn local_index(&self, v: Vertex) -> usize {
        self.local[v]
    }

    pub fn original_label(&self, a: usize) -> &str {
        &self.original[a]
    }

    pub fn index_of_original(&self, label: &str) -> Option<usize> {
        self.original.iter().position(|l| l == label)
    }

    /// Checks that `other` has the same community sizes and original labels.
    pub fn check_compatible(&self, other: &CommunityPartition) -> Result<()> {
        if self.sizes() != other.sizes() {
            return Err(Error::arg(format!(
                "community sizes differ: {:?} vs {:?}",
                self.sizes(),
                other.sizes()
            )));
        }
        if self.original != other.original {
            return Err(Error::arg("community labels differ between graphs"));
        }
        Ok(())
    }
}
