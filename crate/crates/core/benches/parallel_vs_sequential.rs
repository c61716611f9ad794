use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dmaj::cnr::w_c_sample;
use dmaj::dissipation::equidistant_d;
use dmaj::polytope::vertices_with;
use dmaj::reach::{reachable_bound, BoundOptions};
use dmaj::{sample, ComplexMatrix, Exec};
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn vertex_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("vertices");
    group.sample_size(10);
    let mut rng = SplitMix64::seed_from_u64(1);
    for n in [6, 7] {
        let d = sample::weights(&mut rng, n);
        let y = sample::simplex_point(&mut rng, n);
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| b.iter(|| vertices_with(&y, &d, exec).unwrap()));
        }
    }
    group.finish();
}

fn bound_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("bound_monte_carlo");
    group.sample_size(10);
    let d = equidistant_d(0.5, 3).unwrap();
    let x0 = [0.2, 0.5, 0.3];
    for (name, exec) in POLICIES {
        let opts = BoundOptions { samples: 2000, exec, ..Default::default() };
        group.bench_function(name, |b| b.iter(|| reachable_bound(&x0, &d, opts).unwrap()));
    }
    group.finish();
}

fn numerical_range(c: &mut Criterion) {
    let mut group = c.benchmark_group("w_c_sample");
    group.sample_size(10);
    let mut rng = SplitMix64::seed_from_u64(2);
    let cm: ComplexMatrix = sample::hermitian(&mut rng, 4);
    let a = sample::hermitian(&mut rng, 4);
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| b.iter(|| w_c_sample(&cm, &a, 5000, 3, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, vertex_enumeration, bound_sampling, numerical_range);
criterion_main!(benches);
