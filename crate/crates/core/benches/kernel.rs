//! Sequential against parallel execution of the propagation kernel and of
//! state generation. Build with `--no-default-features` to get the purely
//! sequential core; the parallel rows then run on the calling thread.

use std::hint::black_box;
use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use mapcheck::map::{fixpoint, MapVector, PropagationKernel};
use mapcheck::model::parse_model;
use mapcheck::{explore, AcceptingSet, CsrSnapshot, ExploreConfig, Orientation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_snapshot(n: u32, degree: usize) -> CsrSnapshot {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut edges = Vec::with_capacity(n as usize * degree);
    for s in 0..n {
        for _ in 0..degree {
            edges.push((s, rng.random_range(0..n)));
        }
    }
    let accepting = AcceptingSet::from_members(n as usize, (0..n).filter(|v| v % 1000 == 999));
    CsrSnapshot::from_edges(n as usize, &edges, accepting, Orientation::Transposed)
}

fn propagation(c: &mut Criterion) {
    let snap = random_snapshot(200_000, 6);
    let mut group = c.benchmark_group("propagation_step");
    group.throughput(Throughput::Elements(snap.m() as u64));
    for workers in [1, 2, 4] {
        let kernel = PropagationKernel::new(&snap, workers);
        let x = MapVector::nil(snap.n());
        let mut out = MapVector::nil(snap.n());
        group.bench_with_input(BenchmarkId::from_parameter(workers), &workers, |b, _| {
            b.iter(|| kernel.step(black_box(&x.0), snap.accepting(), &mut out.0).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("fixpoint");
    group.sample_size(10);
    for workers in [1, 4] {
        let kernel = PropagationKernel::new(&snap, workers);
        group.bench_with_input(BenchmarkId::from_parameter(workers), &workers, |b, _| {
            b.iter(|| fixpoint(&kernel, snap.accepting(), true))
        });
    }
    group.finish();
}

fn generation(c: &mut Criterion) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/anderson_ok.cdve");
    let model = parse_model(&std::fs::read_to_string(path).unwrap()).unwrap();
    let mut group = c.benchmark_group("generation");
    group.sample_size(10);
    for workers in [1, 4] {
        let cfg = ExploreConfig {
            detection_interval_edges: None,
            generation_workers: workers,
            kernel_workers: workers,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(workers), &workers, |b, _| {
            b.iter(|| explore(&model, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, propagation, generation);
criterion_main!(benches);
