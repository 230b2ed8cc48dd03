//! Monte Carlo checks of the generator and of the statistics built on it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use csbm::graph::Permutation;
use csbm::harness::{accuracy, estimate_params_pooled};
use csbm::matcher::sample_index_set;
use csbm::matcher::IndexSet;
use csbm::sbm::{generate_correlated_pair, PairOptions, PermutationMode, SbmParams};

fn pair_count(n: usize) -> f64 {
    (n * n.saturating_sub(1) / 2) as f64
}

#[test]
fn edge_counts_follow_the_model() {
    let params = SbmParams {
        sizes: vec![300, 200, 100],
        p: 0.05,
        q: 0.02,
        alpha: 0.2,
    };
    let intra: f64 = params.sizes.iter().map(|&s| pair_count(s)).sum();
    let all = pair_count(params.n());
    let inter = all - intra;
    let (pp, qq) = (params.parent_intra(), params.parent_inter());
    assert!((pp - 0.0625).abs() < 1e-15 && (qq - 0.025).abs() < 1e-15);
    let parent_mean = intra * pp + inter * qq;
    let parent_sd = (intra * pp * (1.0 - pp) + inter * qq * (1.0 - qq)).sqrt();
    // a child edge is a Bernoulli(p) or Bernoulli(q) pair
    let child_mean = intra * params.p + inter * params.q;
    let child_sd =
        (intra * params.p * (1.0 - params.p) + inter * params.q * (1.0 - params.q)).sqrt();

    let reps = 10;
    let (mut parent_sum, mut child_sum) = (0.0, 0.0);
    for seed in 0..reps {
        let pair = generate_correlated_pair(&params, seed, PairOptions::default()).unwrap();
        parent_sum += pair.parent.as_ref().unwrap().edge_count() as f64;
        child_sum += pair.g_prime.graph.edge_count() as f64 + pair.g_pi.graph.edge_count() as f64;
    }
    let r = reps as f64;
    assert!((parent_sum / r - parent_mean).abs() < 4.0 * parent_sd / r.sqrt());
    assert!((child_sum / (2.0 * r) - child_mean).abs() < 4.0 * child_sd / (2.0 * r).sqrt());
}

#[test]
fn children_are_subgraphs_of_the_parent() {
    let params = SbmParams::balanced(300, 3, 0.06, 0.02, 0.3);
    for seed in 0..5 {
        let pair = generate_correlated_pair(&params, seed, PairOptions::default()).unwrap();
        let parent = pair.parent.as_ref().unwrap();
        for (u, v) in pair.g_prime.graph.edges() {
            assert!(parent.has_edge(u, v));
        }
        let inv = pair.truth.inverse();
        for (u, v) in pair.g_pi.graph.edges() {
            assert!(parent.has_edge(inv.apply(u), inv.apply(v)));
        }
        // the hidden permutation keeps every vertex in its community
        for v in 0..params.n() {
            let a = pair.g_prime.partition.label(v);
            let b = pair.g_pi.partition.label(pair.truth.apply(v));
            assert_eq!(
                pair.g_prime.partition.original_label(a),
                pair.g_pi.partition.original_label(b)
            );
        }
    }
}

#[test]
fn aligned_overlap_is_one_minus_alpha() {
    for alpha in [0.0, 0.1, 0.3, 0.6] {
        let params = SbmParams::balanced(1200, 4, 0.05, 0.02, alpha);
        let pair = generate_correlated_pair(&params, 9, PairOptions::default()).unwrap();
        let total = pair.g_prime.graph.edge_count() as f64;
        let sd = (alpha * (1.0 - alpha) / total).sqrt();
        let overlap = pair.aligned_edge_overlap();
        assert!(
            (overlap - (1.0 - alpha)).abs() <= 4.0 * sd + 1e-12,
            "alpha {alpha}: overlap {overlap}"
        );
    }
}

#[test]
fn uniform_permutation_mixes_communities() {
    let params = SbmParams::balanced(400, 4, 0.05, 0.02, 0.1);
    let opts = PairOptions {
        permutation: PermutationMode::Uniform,
        keep_parent: false,
    };
    let pair = generate_correlated_pair(&params, 4, opts).unwrap();
    assert!(pair.truth.is_bijection());
    // labels travel with the vertices
    for v in 0..params.n() {
        let a = pair.g_prime.partition.label(v);
        let b = pair.g_pi.partition.label(pair.truth.apply(v));
        assert_eq!(
            pair.g_prime.partition.original_label(a),
            pair.g_pi.partition.original_label(b)
        );
    }
    let moved = (0..params.n())
        .filter(|&v| v / 100 != pair.truth.apply(v) / 100)
        .count();
    assert!(moved > 200);
}

#[test]
fn index_set_is_uniform() {
    // 16 indices, |J| = 4: each index is drawn with probability 1/4
    let draws = 10_000;
    let mut hits = [0u32; 16];
    for seed in 0..draws {
        match sample_index_set(2, 2, 2, seed).unwrap() {
            IndexSet::Sampled { indices, .. } => {
                assert_eq!(indices.len(), 4);
                assert!(indices.windows(2).all(|w| w[0] < w[1]));
                for s in indices {
                    hits[s as usize] += 1;
                }
            }
            IndexSet::Full { .. } => panic!("expected a sampled set"),
        }
    }
    let mean = draws as f64 * 0.25;
    let sd = (draws as f64 * 0.25 * 0.75).sqrt();
    for (s, &h) in hits.iter().enumerate() {
        assert!((h as f64 - mean).abs() < 4.0 * sd, "index {s}: {h} hits");
    }
    assert!(matches!(
        sample_index_set(2, 2, 8, 0).unwrap(),
        IndexSet::Full { bits: 4 }
    ));
}

#[test]
fn estimates_recover_densities() {
    let (p, q) = (0.05, 0.05 / 3.0);
    let params = SbmParams::balanced(2400, 3, p, q, 0.1);
    for seed in 0..10 {
        let pair = generate_correlated_pair(&params, seed, PairOptions::default()).unwrap();
        let est = estimate_params_pooled(&[&pair.g_pi, &pair.g_prime]).unwrap();
        for a in 0..3 {
            let p_hat = est.p_hat(a);
            assert!((p_hat - p).abs() <= 0.15 * p, "seed {seed}: p_hat {p_hat}");
            for b in (0..3).filter(|&b| b != a) {
                let q_hat = est.q_hat(a, b);
                assert!((q_hat - q).abs() <= 0.15 * q, "seed {seed}: q_hat {q_hat}");
            }
            // n p (1 - p) = 38
            let var = est.intra_variance[a];
            assert!((var - 38.0).abs() < 0.25 * 38.0, "variance {var}");
        }
    }
}

#[test]
fn random_matching_accuracy_is_one_over_n() {
    // fixed points of a uniform permutation have mean 1 and variance 1
    let n = 500;
    let reps = 4000;
    let truth = Permutation::identity(n);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut total = 0.0;
    for _ in 0..reps {
        let guess = Permutation::random(n, &mut rng);
        total += accuracy(&guess, &truth, None).unwrap();
    }
    let mean = total / reps as f64;
    let sd = 1.0 / (n as f64 * (reps as f64).sqrt());
    assert!(
        (mean - 1.0 / n as f64).abs() < 4.0 * sd,
        "mean accuracy {mean}"
    );
}
