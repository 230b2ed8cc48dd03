//! Production code against slow, independent reimplementations.

mod common;

use csbm::graph::{LabeledGraph, Permutation};
use csbm::matcher::{
    local_truth, one_hop_weights, seeded_match_greedy, two_hop_weights, SeedWeights,
};
use csbm::sbm::{generate_correlated_pair, CorrelatedPair, PairOptions, SbmParams};
use csbm::signature::{build_partition_tree, DegreeTransform, ParentRule};
use csbm::Execution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{hand_fixture, hyper_for, random_labeled, Dense};

#[test]
fn partition_trees_match_bruteforce() {
    common::tree_oracle_suite().unwrap();
}

#[test]
fn hand_fixture_spot_values() {
    let lg = hand_fixture();
    let part = &lg.partition;
    assert_eq!(part.index_of_original("t"), Some(part.smallest()));
    let mut h = hyper_for(&lg, 2, 2, ParentRule::SmallestCode);
    h.sign_thresholds = vec![1.0, 1.0];
    let a_slot = h
        .selected
        .iter()
        .position(|&x| Some(x) == part.index_of_original("a"))
        .unwrap();
    let b_slot = 1 - a_slot;
    let tree = build_partition_tree(&lg, &h, 0).unwrap();
    // vertex 1 reaches both "a" and "b"; vertex 2 only "b"
    assert_eq!(tree.node(1, (1 << a_slot) | (1 << b_slot)), &[1]);
    assert_eq!(tree.node(1, 1 << b_slot), &[2]);
    // vertex 3 hangs below 2 and reaches both
    let code3 = (1 << b_slot) | (((1 << a_slot) | (1 << b_slot)) << 2);
    assert_eq!(tree.node(2, code3), &[3]);
    assert_eq!(tree.leaves().len(), 1);
}

#[test]
fn signatures_match_direct_summation() {
    let mut fixtures: Vec<LabeledGraph> = vec![hand_fixture()];
    fixtures.extend((0..20).map(|s| random_labeled(5 + s, 40, 3, 0.15)));
    for lg in &fixtures {
        for transform in [DegreeTransform::Raw, DegreeTransform::Log] {
            let mut h = hyper_for(lg, 1, 2, ParentRule::SmallestCode);
            h.transform = transform;
            common::signatures_match_oracle(lg, &h).unwrap();
        }
    }
}

#[test]
fn leaf_index_roundtrip() {
    common::leaf_roundtrip_suite(1000, 99).unwrap();
}

#[test]
fn normalized_distance_matches_naive_sum() {
    common::distance_naive_suite(200, 3).unwrap();
}

#[test]
fn lap_matches_enumeration() {
    common::lap_enumeration_suite(100, 2024).unwrap();
}

fn small_pair(seed: u64) -> CorrelatedPair {
    let params = SbmParams::balanced(60, 3, 0.25, 0.1, 0.2);
    generate_correlated_pair(&params, seed, PairOptions::default()).unwrap()
}

/// Two-hop weights with the loops turned around: per seed, the target
/// vertices that reach it in each graph.
fn two_hop_transposed(
    g: &LabeledGraph,
    g2: &LabeledGraph,
    seeds: &Permutation,
    s: usize,
    t: usize,
) -> Vec<Vec<u32>> {
    let (dg, dg2) = (Dense::of(g), Dense::of(g2));
    let (mt, mt2) = (g.partition.members(t), g2.partition.members(t));
    let n_t = mt.len();
    let reach = |d: &Dense, members: &[usize], y: usize| -> Vec<bool> {
        members
            .iter()
            .map(|&i| members.iter().any(|&z| d.adj[i][z] && d.adj[z][y]))
            .collect()
    };
    let mut w = vec![vec![0u32; n_t]; n_t];
    for j in 0..g.partition.size(s) {
        let y = g.partition.members(s)[seeds.apply(j)];
        let y2 = g2.partition.members(s)[j];
        let (x1, x2) = (reach(&dg, mt, y), reach(&dg2, mt2, y2));
        for i in 0..n_t {
            for i2 in 0..n_t {
                if x1[i] && x2[i2] {
                    w[i][i2] += 1;
                }
            }
        }
    }
    w
}

fn assert_weights(w: &SeedWeights, want: &[Vec<u32>]) {
    for (i, row) in want.iter().enumerate() {
        for (i2, &c) in row.iter().enumerate() {
            assert_eq!(w.get(i, i2), c, "pair ({i}, {i2})");
        }
    }
}

#[test]
fn two_hop_weights_match_transposed_loops() {
    for seed in 0..6 {
        let pair = small_pair(seed);
        let (g, g2) = (&pair.g_pi, &pair.g_prime);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seeds = if seed % 2 == 0 {
            local_truth(g, g2, &pair.truth, 0).unwrap()
        } else {
            Permutation::random(g.partition.size(0), &mut rng)
        };
        let w = two_hop_weights(g, g2, &seeds, 0, 2, Execution::Parallel).unwrap();
        assert_weights(&w, &two_hop_transposed(g, g2, &seeds, 0, 2));
        let seq = two_hop_weights(g, g2, &seeds, 0, 2, Execution::Sequential).unwrap();
        assert_eq!(w, seq);
        assert!(w.max() as usize <= g.partition.size(0));
    }
}

#[test]
fn greedy_matches_repeated_argmax() {
    for seed in 0..6 {
        let pair = small_pair(100 + seed);
        let (g, g2) = (&pair.g_pi, &pair.g_prime);
        let seeds = local_truth(g, g2, &pair.truth, 1).unwrap();
        let w = one_hop_weights(g, g2, &seeds, 1, 0, Execution::Sequential).unwrap();
        let n = w.n();
        let mut row_free = vec![true; n];
        let mut col_free = vec![true; n];
        let mut forward = vec![usize::MAX; n];
        for _ in 0..n {
            // strict comparison keeps the smallest (i, i') among ties
            let mut best: Option<(u32, usize, usize)> = None;
            for i in (0..n).filter(|&i| row_free[i]) {
                for i2 in (0..n).filter(|&i2| col_free[i2]) {
                    let c = w.get(i, i2);
                    if best.is_none_or(|(bc, _, _)| c > bc) {
                        best = Some((c, i, i2));
                    }
                }
            }
            let (_, i, i2) = best.unwrap();
            row_free[i] = false;
            col_free[i2] = false;
            forward[i2] = i;
        }
        let got = seeded_match_greedy(g, g2, &seeds, 1, 0, Execution::Sequential).unwrap();
        assert_eq!(got.forward(), forward.as_slice(), "seed {seed}");
    }
}
