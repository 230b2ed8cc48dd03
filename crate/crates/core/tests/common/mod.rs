//! Slow reference implementations and property checks shared by the suites.
//!
//! Each check returns `Err` with a description of the first violation so the
//! acceptance runner can report it without panicking.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use csbm::assignment::{solve_lap, solve_lap_max, CostMatrix};
use csbm::graph::{CommunityPartition, Graph, LabeledGraph};
use csbm::matcher::normalized_distance;
use csbm::signature::{
    build_partition_tree, compute_signatures, decode_leaf_index, encode_leaf_index,
    DegreeTransform, ParentRule, Sign, SignatureHyper,
};
use csbm::Execution;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !($cond) {
            return Err(format!($($msg)+));
        }
    };
}

pub type Levels = Vec<BTreeMap<u64, Vec<usize>>>;

/// Adjacency-matrix copy of a labeled graph.
pub struct Dense {
    pub adj: Vec<Vec<bool>>,
    pub labels: Vec<usize>,
}

impl Dense {
    pub fn of(lg: &LabeledGraph) -> Self {
        let n = lg.n();
        let mut adj = vec![vec![false; n]; n];
        for (u, v) in lg.graph.edges() {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        Dense {
            adj,
            labels: lg.partition.labels().to_vec(),
        }
    }

    pub fn degree_into(&self, j: usize, a: usize) -> usize {
        (0..self.adj.len())
            .filter(|&x| self.adj[j][x] && self.labels[x] == a)
            .count()
    }

    /// Distances from `root` inside community `c`, by repeated relaxation.
    pub fn distances(&self, root: usize, c: usize) -> Vec<Option<usize>> {
        let n = self.adj.len();
        let mut dist = vec![None; n];
        dist[root] = Some(0);
        for d in 0..n {
            let layer: Vec<usize> = (0..n).filter(|&x| dist[x] == Some(d)).collect();
            if layer.is_empty() {
                break;
            }
            for u in layer {
                for x in 0..n {
                    if self.adj[u][x] && self.labels[x] == c && dist[x].is_none() {
                        dist[x] = Some(d + 1);
                    }
                }
            }
        }
        dist
    }

    pub fn bits(&self, j: usize, h: &SignatureHyper) -> u64 {
        let mut b = 0;
        for (slot, &a) in h.selected.iter().enumerate() {
            if self.degree_into(j, a) as f64 >= h.sign_thresholds[slot] {
                b |= 1 << slot;
            }
        }
        b
    }

    /// Node contents per depth under the single-parent rule of `h`.
    pub fn tree(&self, h: &SignatureHyper, root: usize) -> Levels {
        let dist = self.distances(root, h.target);
        let n = self.adj.len();
        let mut code: Vec<Option<u64>> = vec![None; n];
        code[root] = Some(0);
        let mut levels = vec![BTreeMap::from([(0u64, vec![root])])];
        for d in 1..=h.ell {
            let mut level: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
            for j in (0..n).filter(|&j| dist[j] == Some(d)) {
                let preds = (0..n).filter(|&u| dist[u] == Some(d - 1) && self.adj[u][j]);
                let parent_code = match h.parent_rule {
                    ParentRule::SmallestId => preds.map(|u| code[u].unwrap()).next(),
                    ParentRule::SmallestCode => preds.map(|u| code[u].unwrap()).min(),
                }
                .unwrap();
                let c = parent_code | (self.bits(j, h) << ((d - 1) * h.kprime));
                code[j] = Some(c);
                level.entry(c).or_default().push(j);
            }
            levels.push(level);
        }
        levels
    }

    /// The multi-parent definition: a sphere vertex joins the child of every
    /// node it is adjacent to.
    pub fn tree_all_parents(&self, h: &SignatureHyper, root: usize) -> Levels {
        let dist = self.distances(root, h.target);
        let n = self.adj.len();
        let mut levels = vec![BTreeMap::from([(0u64, vec![root])])];
        for d in 1..=h.ell {
            let mut level: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
            for (&pc, members) in &levels[d - 1] {
                for j in (0..n).filter(|&j| dist[j] == Some(d)) {
                    if members.iter().any(|&u| self.adj[u][j]) {
                        let c = pc | (self.bits(j, h) << ((d - 1) * h.kprime));
                        level.entry(c).or_default().push(j);
                    }
                }
            }
            for v in level.values_mut() {
                v.sort_unstable();
                v.dedup();
            }
            levels.push(level);
        }
        levels
    }
}

/// Signature hyper-parameters signing the smallest community against the
/// next `kprime` communities, with thresholds at 30% of their sizes.
pub fn hyper_for(lg: &LabeledGraph, kprime: usize, ell: usize, rule: ParentRule) -> SignatureHyper {
    let part = &lg.partition;
    let target = part.smallest();
    let selected: Vec<usize> = (0..part.k())
        .filter(|&a| a != target)
        .take(kprime)
        .collect();
    SignatureHyper {
        kprime,
        ell,
        target,
        sign_thresholds: selected
            .iter()
            .map(|&a| part.size(a) as f64 * 0.3)
            .collect(),
        selected,
        reserved: None,
        transform: DegreeTransform::Raw,
        parent_rule: rule,
        center: 1.5,
        unit_variance: 0.75,
    }
}

/// Erdős–Rényi graph with uniformly drawn labels; labels `0..k` each occur.
pub fn random_labeled(seed: u64, n: usize, k: usize, density: f64) -> LabeledGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<usize> = (0..n)
        .map(|v| if v < k { v } else { rng.random_range(0..k) })
        .collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(density) {
                edges.push((u, v));
            }
        }
    }
    LabeledGraph::new(
        Graph::from_edges(n, edges).unwrap(),
        CommunityPartition::from_labels(&labels),
    )
    .unwrap()
}

/// Twelve vertices in three communities of four; the target community
/// `t = {0, 1, 2, 3}` induces the tree 0-1, 0-2, 2-3.
pub fn hand_fixture() -> LabeledGraph {
    let edges = [
        (0, 1),
        (0, 2),
        (2, 3),
        (0, 4),
        (0, 8),
        (1, 4),
        (1, 5),
        (1, 9),
        (2, 10),
        (2, 11),
        (3, 6),
        (3, 7),
        (3, 8),
        (4, 5),
        (9, 10),
    ];
    let labels = ["t", "t", "t", "t", "a", "a", "a", "a", "b", "b", "b", "b"];
    LabeledGraph::new(
        Graph::from_edges(12, edges).unwrap(),
        CommunityPartition::from_labels(&labels),
    )
    .unwrap()
}

/// Every tree rooted in the target community against the brute-force oracle.
pub fn trees_match_oracle(lg: &LabeledGraph, h: &SignatureHyper) -> Check {
    let dense = Dense::of(lg);
    for &root in lg.partition.members(h.target) {
        let tree = build_partition_tree(lg, h, root).map_err(|e| e.to_string())?;
        let want = dense.tree(h, root);
        ensure!(
            tree.levels == want,
            "root {root} ({:?}): got {:?}, oracle {:?}",
            h.parent_rule,
            tree.levels,
            want
        );
    }
    Ok(())
}

/// The hand fixture and 60 random graphs, under both parent rules.
pub fn tree_oracle_suite() -> Check {
    let lg = hand_fixture();
    let dense = Dense::of(&lg);
    for rule in [ParentRule::SmallestCode, ParentRule::SmallestId] {
        let mut h = hyper_for(&lg, 2, 2, rule);
        h.sign_thresholds = vec![1.0, 1.0];
        trees_match_oracle(&lg, &h)?;
        for &root in lg.partition.members(h.target) {
            // the target neighborhood is a tree, so every rule agrees with
            // the multi-parent definition
            ensure!(
                dense.tree(&h, root) == dense.tree_all_parents(&h, root),
                "hand fixture root {root}: rules disagree on a tree"
            );
        }
    }
    for case in 0..60u64 {
        let lg = random_labeled(11 + case, 30, 4, 0.2);
        let rule = if case % 2 == 0 {
            ParentRule::SmallestCode
        } else {
            ParentRule::SmallestId
        };
        let kprime = 1 + (case % 2) as usize;
        let h = hyper_for(&lg, kprime, 1 + (case % 3) as usize, rule);
        trees_match_oracle(&lg, &h).map_err(|e| format!("random case {case}: {e}"))?;
    }
    Ok(())
}

/// Signature entries against a direct sum over the oracle's leaves.
pub fn signatures_match_oracle(lg: &LabeledGraph, h: &SignatureHyper) -> Check {
    let dense = Dense::of(lg);
    let sigs = compute_signatures(lg, h, Execution::Sequential).map_err(|e| e.to_string())?;
    for (x, &root) in lg.partition.members(h.target).iter().enumerate() {
        let sig = &sigs[x];
        let leaves = &dense.tree(h, root)[h.ell];
        ensure!(
            sig.entries.len() == leaves.len(),
            "root {root}: {} stored leaves, oracle has {}",
            sig.entries.len(),
            leaves.len()
        );
        for (code, members) in leaves {
            let mut f = 0.0f64;
            for &j in members {
                let d = dense.degree_into(j, h.target) as f64;
                f += match h.transform {
                    DegreeTransform::Raw => d - 1.0 - h.center,
                    DegreeTransform::Log => (1.0 + d).ln() - h.center,
                };
            }
            let e = sig
                .get(*code)
                .ok_or_else(|| format!("root {root}: leaf {code} missing"))?;
            ensure!(
                (e.f - f).abs() <= 1e-12 * f.abs().max(1.0),
                "root {root} leaf {code}: f = {}, oracle {f}",
                e.f
            );
            ensure!(
                e.v == h.unit_variance * members.len() as f64 && e.size as usize == members.len(),
                "root {root} leaf {code}: v or size off"
            );
        }
    }
    Ok(())
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// `cases` random matrices with `n = 1..=8` against enumeration of all
/// assignments, plus dual feasibility and a zero duality gap.
pub fn lap_enumeration_suite(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<Vec<Vec<usize>>> = (0..=8).map(permutations).collect();
    for case in 0..cases {
        let n = 1 + case % 8;
        let integer = case % 3 == 0;
        let data: Vec<f64> = (0..n * n)
            .map(|_| {
                if integer {
                    rng.random_range(0..5) as f64
                } else {
                    rng.random_range(-50.0..50.0)
                }
            })
            .collect();
        let c = CostMatrix::new(n, data.clone()).map_err(|e| e.to_string())?;
        // sigma maps column -> row
        let totals: Vec<f64> = all[n]
            .iter()
            .map(|sigma| (0..n).map(|col| data[sigma[col] * n + col]).sum())
            .collect();
        let best = totals.iter().copied().fold(f64::INFINITY, f64::min);
        let worst = totals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sol = solve_lap(&c);
        ensure!(
            sol.assignment.is_bijection(),
            "case {case}: not a bijection"
        );
        ensure!(
            (sol.cost - best).abs() < 1e-9 && (c.cost_of(&sol.assignment) - best).abs() < 1e-9,
            "case {case} (n = {n}): cost {}, enumeration {best}",
            sol.cost
        );
        for i in 0..n {
            for j in 0..n {
                ensure!(
                    sol.row_potential[i] + sol.col_potential[j] <= c.get(i, j) + 1e-9,
                    "case {case}: dual infeasible at ({i}, {j})"
                );
            }
        }
        let dual: f64 = sol.row_potential.iter().chain(&sol.col_potential).sum();
        ensure!(
            (dual - best).abs() < 1e-9,
            "case {case}: duality gap {}",
            dual - best
        );
        let max = solve_lap_max(&c);
        ensure!(
            (c.cost_of(&max) - worst).abs() < 1e-9,
            "case {case}: maximization {} vs {worst}",
            c.cost_of(&max)
        );
    }
    Ok(())
}

/// Distances over random dense vectors against a plain loop, at 1e-12 relative.
pub fn distance_naive_suite(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let len = 64;
        let mut v = vec![0.0f64; len];
        let mut v2 = vec![0.0f64; len];
        let mut f = vec![0.0f64; len];
        let mut f2 = vec![0.0f64; len];
        for s in 0..len {
            if rng.random_bool(0.8) {
                v[s] = rng.random_range(0.1..10.0);
                f[s] = rng.random_range(-20.0..20.0);
            }
            if rng.random_bool(0.8) {
                v2[s] = rng.random_range(0.1..10.0);
                f2[s] = rng.random_range(-20.0..20.0);
            }
        }
        let j: Vec<usize> = (0..len).filter(|_| rng.random_bool(0.6)).collect();
        let mut naive = 0.0f64;
        for &s in &j {
            let denom = v[s] + v2[s];
            if denom != 0.0 {
                naive += (f[s] - f2[s]).powi(2) / denom;
            }
        }
        let got = normalized_distance(&f, &v, &f2, &v2, &j).map_err(|e| e.to_string())?;
        ensure!(
            (got - naive).abs() <= 1e-12 * naive.abs().max(f64::MIN_POSITIVE),
            "case {case}: {got} vs naive {naive}"
        );
    }
    Ok(())
}

/// Encode/decode round trip of `count` random sign strings.
pub fn leaf_roundtrip_suite(count: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let kprime = rng.random_range(1..=8);
        let ell = rng.random_range(1..=63 / kprime);
        let signs: Vec<Sign> = (0..kprime * ell)
            .map(|_| {
                if rng.random_bool(0.5) {
                    Sign::Pos
                } else {
                    Sign::Neg
                }
            })
            .collect();
        let index = encode_leaf_index(&signs, kprime, ell).map_err(|e| e.to_string())?;
        ensure!(index < 1u64 << (kprime * ell), "index {index} out of range");
        let back = decode_leaf_index(index, kprime, ell).map_err(|e| e.to_string())?;
        ensure!(
            back == signs,
            "round trip failed for k' = {kprime}, ell = {ell}"
        );
        // bit (r-1)·k' + (a-1) carries s_r(a)
        for (b, s) in signs.iter().enumerate() {
            ensure!(
                ((index >> b) & 1 == 1) == (*s == Sign::Pos),
                "bit {b} of {index} disagrees with its sign"
            );
        }
    }
    Ok(())
}

/// Nodes at each depth are disjoint, cover the sphere, and every member has
/// a neighbor in its parent node.
pub fn tree_levels_ok(lg: &LabeledGraph, h: &SignatureHyper) -> Check {
    let members = lg.partition.members(h.target);
    for &root in members {
        let tree = build_partition_tree(lg, h, root).map_err(|e| e.to_string())?;
        ensure!(tree.depth() == h.ell, "root {root}: depth {}", tree.depth());
        for d in 0..=h.ell {
            let mut seen: Vec<usize> = tree.levels[d].values().flatten().copied().collect();
            let total = seen.len();
            seen.sort_unstable();
            seen.dedup();
            ensure!(
                seen.len() == total,
                "root {root}: nodes at depth {d} overlap"
            );
            let sphere = lg
                .graph
                .sphere(members, root, d)
                .map_err(|e| e.to_string())?;
            ensure!(
                seen == sphere,
                "root {root}: depth {d} does not cover its sphere"
            );
            if d == 0 {
                continue;
            }
            let parent_mask = (1u64 << ((d - 1) * h.kprime)) - 1;
            for (&code, verts) in &tree.levels[d] {
                ensure!(
                    code < 1u64 << (d * h.kprime),
                    "code {code} too wide at depth {d}"
                );
                let parent = tree.node(d - 1, code & parent_mask);
                for &j in verts {
                    ensure!(
                        parent.iter().any(|&u| lg.graph.has_edge(u, j)),
                        "root {root}: vertex {j} not adjacent to its parent node"
                    );
                }
            }
        }
    }
    Ok(())
}

/// `v[s] = 0` exactly on empty leaves, where `f[s] = 0` as well; both
/// execution modes agree.
pub fn zero_coupling_ok(lg: &LabeledGraph, h: &SignatureHyper) -> Check {
    let sigs = compute_signatures(lg, h, Execution::Sequential).map_err(|e| e.to_string())?;
    for (x, sig) in sigs.iter().enumerate() {
        let (f, v, sizes) = sig.to_dense().map_err(|e| e.to_string())?;
        for s in 0..f.len() {
            ensure!(
                (v[s] == 0.0) == (sizes[s] == 0),
                "vertex {x} leaf {s}: v = {} with {} members",
                v[s],
                sizes[s]
            );
            ensure!(
                sizes[s] > 0 || f[s] == 0.0,
                "vertex {x} leaf {s}: f = {} on an empty leaf",
                f[s]
            );
        }
    }
    let par = compute_signatures(lg, h, Execution::Parallel).map_err(|e| e.to_string())?;
    ensure!(par == sigs, "parallel signatures differ from sequential");
    Ok(())
}
