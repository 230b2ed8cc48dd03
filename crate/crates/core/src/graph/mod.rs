//! Graph, community-partition and permutation primitives.
//!
//! Graphs are stored in compressed sparse row form with each neighbor list
//! sorted ascending, so membership tests are binary searches and the hot
//! loops (tree construction, witness counting) are contiguous scans.

mod partition;
pub(crate) mod permutation;

use std::collections::VecDeque;

pub use partition::CommunityPartition;
pub use permutation::Permutation;

use crate::error::{Error, Result};

pub type Vertex = usize;

/// Immutable undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<Vertex>,
}

impl Graph {
    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
        }
    }

    /// Builds a graph from an undirected edge list.
    ///
    /// Duplicate edges (in either orientation) collapse to one. Self-loops and
    /// out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut pairs = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::arg(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::arg(format!("self-loop at vertex {u}")));
            }
            pairs.push((u, v));
            pairs.push((v, u));
        }
        Ok(Self::from_directed_pairs(n, pairs))
    }

    /// `pairs` must already contain both orientations of every edge.
    fn from_directed_pairs(n: usize, mut pairs: Vec<(Vertex, Vertex)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &pairs {
            offsets[u + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let neighbors = pairs.into_iter().map(|(_, v)| v).collect();
        Graph { offsets, neighbors }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Sorted neighbor list of `v`.
    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n() && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Every edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v >= self.n() {
            return Err(Error::arg(format!(
                "vertex {v} out of range for {} vertices",
                self.n()
            )));
        }
        Ok(())
    }

    /// Number of neighbors of `v` inside community `a`.
    pub fn degree_in_community(
        &self,
        v: Vertex,
        part: &CommunityPartition,
        a: usize,
    ) -> Result<usize> {
        self.check_vertex(v)?;
        if part.n() != self.n() {
            return Err(Error::arg("partition does not cover the graph"));
        }
        if a >= part.k() {
            return Err(Error::arg(format!(
                "community {a} out of range for {} communities",
                part.k()
            )));
        }
        Ok(self
            .neighbors(v)
            .iter()
            .filter(|&&u| part.label(u) == a)
            .count())
    }

    /// Vertices of `restrict` at BFS distance exactly `r` from `i` inside the
    /// subgraph induced by `restrict`.
    pub fn sphere(&self, restrict: &[Vertex], i: Vertex, r: usize) -> Result<Vec<Vertex>> {
        self.check_vertex(i)?;
        let mut inside = vec![false; self.n()];
        for &v in restrict {
            self.check_vertex(v)?;
            inside[v] = true;
        }
        if !inside[i] {
            return Err(Error::arg(format!(
                "vertex {i} is not in the restriction set"
            )));
        }
        let dist = self.bfs_distances(i, |v| inside[v], Some(r));
        let mut out: Vec<Vertex> = (0..self.n()).filter(|&v| dist[v] == Some(r)).collect();
        out.sort_unstable();
        Ok(out)
    }

    /// BFS distances from `root` through vertices accepted by `allowed`,
    /// stopping after depth `limit` when given.
    pub(crate) fn bfs_distances<F>(
        &self,
        root: Vertex,
        allowed: F,
        limit: Option<usize>,
    ) -> Vec<Option<usize>>
    where
        F: Fn(Vertex) -> bool,
    {
        let mut dist = vec![None; self.n()];
        dist[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            if limit.is_some_and(|l| du >= l) {
                continue;
            }
            for &v in self.neighbors(u) {
                if dist[v].is_none() && allowed(v) {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Relabels vertices: edge `(u, v)` becomes `(p(u), p(v))`.
    pub fn apply_permutation(&self, p: &Permutation) -> Result<Graph> {
        if p.len() != self.n() {
            return Err(Error::arg(format!(
                "permutation of size {} applied to graph of size {}",
                p.len(),
                self.n()
            )));
        }
        let pairs = (0..self.n())
            .flat_map(|u| {
                self.neighbors(u)
                    .iter()
                    .map(move |&v| (p.apply(u), p.apply(v)))
            })
            .collect();
        Ok(Self::from_directed_pairs(self.n(), pairs))
    }

    /// Subgraph induced by `members`, relabeled so `members[x]` becomes `x`.
    pub fn induced(&self, members: &[Vertex]) -> Graph {
        let mut local = vec![usize::MAX; self.n()];
        for (x, &v) in members.iter().enumerate() {
            local[v] = x;
        }
        let mut offsets = Vec::with_capacity(members.len() + 1);
        offsets.push(0);
        let mut neighbors = Vec::new();
        for &v in members {
            let start = neighbors.len();
            neighbors.extend(
                self.neighbors(v)
                    .iter()
                    .map(|&u| local[u])
                    .filter(|&x| x != usize::MAX),
            );
            neighbors[start..].sort_unstable();
            offsets.push(neighbors.len());
        }
        Graph { offsets, neighbors }
    }

    /// Sum of all degrees (twice the edge count).
    pub fn degree_sum(&self) -> usize {
        self.neighbors.len()
    }
}

/// A graph together with the community labels of its vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub partition: CommunityPartition,
}

impl LabeledGraph {
    pub fn new(graph: Graph, partition: CommunityPartition) -> Result<Self> {
        if graph.n() != partition.n() {
            return Err(Error::arg(format!(
                "graph has {} vertices but partition covers {}",
                graph.n(),
                partition.n()
            )));
        }
        Ok(LabeledGraph { graph, partition })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Subgraph induced by community `a`, in local member order.
    pub fn community_subgraph(&self, a: usize) -> Graph {
        self.graph.induced(self.partition.members(a))
    }
}

/// Degrees of every vertex into every community, stored row-major (`n × k`).
#[derive(Debug, Clone)]
pub struct CommunityDegrees {
    k: usize,
    counts: Vec<u32>,
}

impl CommunityDegrees {
    pub fn new(g: &Graph, part: &CommunityPartition) -> Self {
        let k = part.k();
        let mut counts = vec![0u32; g.n() * k];
        for v in 0..g.n() {
            let row = &mut counts[v * k..(v + 1) * k];
            for &u in g.neighbors(v) {
                row[part.label(u)] += 1;
            }
        }
        CommunityDegrees { k, counts }
    }

    #[inline]
    pub fn get(&self, v: Vertex, a: usize) -> u32 {
        self.counts[v * self.k + a]
    }
}
