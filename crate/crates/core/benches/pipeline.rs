//! Benchmarks for the solver hot path and the data-parallel batch
//! classification, comparing the rayon pool against single-threaded
//! execution. Building with `--no-default-features` benches the compiled
//! sequential fallback instead (both groups then coincide).

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ndarray::Array1;

use mvsrc_core::data::{split_random, synth_generate, SynthConfig};
use mvsrc_core::experiment::{assemble_observations, classify_test_set, EvalParams, Method};
use mvsrc_core::jpcem::{jpcem_solve, JpcemConfig};
use mvsrc_core::solver::{augment, solve_weighted_lasso, WeightedLassoProblem};
use mvsrc_core::{Dictionary, MultiViewObservation};

struct Fixture {
    dict: Dictionary,
    observations: Vec<(MultiViewObservation, u32)>,
}

fn fixture() -> Fixture {
    let config = SynthConfig {
        num_classes: 5,
        num_views: 5,
        ambient_dim: 200,
        subspace_dim: 4,
        train_per_class_view: 5,
        test_per_class_view: 4,
        noise_std: 0.05,
        seed: 7,
    };
    let (train, test) = synth_generate(&config).unwrap();
    let pool: Vec<_> = train.into_iter().chain(test).collect();
    let (train, test) = split_random(&pool, 5, 4, 42).unwrap();
    let triples: Vec<(u32, u32, Array1<f64>)> = train
        .iter()
        .map(|s| (s.class_id, s.view_id, s.vector.clone()))
        .collect();
    let dict = Dictionary::build(&triples).unwrap();
    let views: Vec<u32> = (1..=5).collect();
    let observations = assemble_observations(&test, &views).unwrap();
    Fixture { dict, observations }
}

fn bench_weighted_lasso(c: &mut Criterion) {
    let f = fixture();
    let y = f.observations[0].0.view(0).to_owned();
    let system = augment(&f.dict, &y, 2e-5).unwrap();
    let k = system.num_coefficients();
    let weights = Array1::from_elem(k, 0.2);
    let problem = WeightedLassoProblem::new(system, weights).unwrap();
    let x0 = Array1::zeros(k);
    c.bench_function("weighted_lasso_k125", |b| {
        b.iter(|| solve_weighted_lasso(black_box(&problem), &x0, 1e-8, 500).unwrap())
    });
}

fn bench_jpcem_single(c: &mut Criterion) {
    let f = fixture();
    let cfg = JpcemConfig::default();
    let obs = &f.observations[0].0;
    c.bench_function("jpcem_solve_5views", |b| {
        b.iter(|| jpcem_solve(black_box(&f.dict), black_box(obs), &cfg).unwrap())
    });
}

fn bench_batch_classification(c: &mut Criterion) {
    let f = fixture();
    let params = EvalParams::default();
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let mut group = c.benchmark_group("batch_classify");
    group.sample_size(10);
    for method in [Method::Jpcem, Method::SrcMultiview] {
        group.bench_function(BenchmarkId::new(method.name(), "parallel"), |b| {
            b.iter(|| {
                classify_test_set(&f.dict, black_box(&f.observations), method, &params).unwrap()
            })
        });
        group.bench_function(BenchmarkId::new(method.name(), "single-thread"), |b| {
            b.iter(|| {
                single.install(|| {
                    classify_test_set(&f.dict, black_box(&f.observations), method, &params).unwrap()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_weighted_lasso,
    bench_jpcem_single,
    bench_batch_classification
);
criterion_main!(benches);
