//! Sequential vs rayon execution of the row-parallel kernels.
//!
//! Build without default features to see the fallback path: both modes then
//! run on the calling thread.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use csbm::matcher::{
    build_similarity_matrix, local_truth, run_pair, two_hop_weights, ParamSource, PipelineConfig,
    Stage1Route, WitnessMatrix,
};
use csbm::sbm::{generate_correlated_pair, CorrelatedPair, PairOptions, SbmParams};
use csbm::signature::{compute_signatures, SignatureHyper, TreeShape};
use csbm::Execution;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn instance(n: usize) -> CorrelatedPair {
    let p = 0.08;
    let params = SbmParams::balanced(n, 4, p, p / 3.0, 0.05);
    generate_correlated_pair(&params, 1, PairOptions::default()).unwrap()
}

fn hyper(pair: &CorrelatedPair) -> SignatureHyper {
    let shape = TreeShape {
        kprime: 2,
        ell: 2,
        w: 8,
    };
    SignatureHyper::from_densities(
        &pair.g_pi.partition,
        shape,
        vec![0, 1],
        Some(2),
        0.08,
        0.08 / 3.0,
    )
    .unwrap()
}

fn signatures(c: &mut Criterion) {
    let mut group = c.benchmark_group("signatures");
    for n in [1200, 2400] {
        let pair = instance(n);
        let h = hyper(&pair);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &exec, |b, &exec| {
                b.iter(|| compute_signatures(black_box(&pair.g_pi), &h, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn similarity(c: &mut Criterion) {
    let mut group = c.benchmark_group("similarity_matrix");
    for n in [1200, 2400] {
        let pair = instance(n);
        let h = hyper(&pair);
        let sigs = compute_signatures(&pair.g_pi, &h, Execution::Parallel).unwrap();
        let sigs2 = compute_signatures(&pair.g_prime, &h, Execution::Parallel).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &exec, |b, &exec| {
                b.iter(|| build_similarity_matrix(black_box(&sigs), &sigs2, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn witnesses(c: &mut Criterion) {
    let mut group = c.benchmark_group("witness_matrix");
    for n in [1200, 2400] {
        let pair = instance(n);
        let target = pair.g_pi.partition.smallest();
        let truth = local_truth(&pair.g_pi, &pair.g_prime, &pair.truth, target).unwrap();
        let (g, g2) = (
            pair.g_pi.community_subgraph(target),
            pair.g_prime.community_subgraph(target),
        );
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &exec, |b, &exec| {
                b.iter(|| WitnessMatrix::compute(black_box(&g), &g2, &truth, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn seed_weights(c: &mut Criterion) {
    let mut group = c.benchmark_group("two_hop_weights");
    for n in [1200, 2400] {
        let pair = instance(n);
        let seeds = local_truth(&pair.g_pi, &pair.g_prime, &pair.truth, 0).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &exec, |b, &exec| {
                b.iter(|| two_hop_weights(black_box(&pair.g_pi), &pair.g_prime, &seeds, 0, 3, exec))
            });
        }
    }
    group.finish();
}

fn pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("full_pipeline");
    group.sample_size(10);
    let pair = instance(1200);
    for (name, exec) in MODES {
        let mut cfg = PipelineConfig::new(
            ParamSource::Known {
                p: 0.08,
                q: 0.08 / 3.0,
            },
            1,
        )
        .with_shape(2, 2);
        cfg.stage1 = Stage1Route::Assignment;
        cfg.exec = exec;
        group.bench_function(name, |b| {
            b.iter(|| run_pair(black_box(&pair), &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    signatures,
    similarity,
    witnesses,
    seed_weights,
    pipeline
);
criterion_main!(benches);
