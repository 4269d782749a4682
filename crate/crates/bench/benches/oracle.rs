use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use latticeglow::oracle::DEFAULT_CUTOFF;
use latticeglow::{coefficients, enumerate, oracle_d_moments, StateKind};
use latticeglow_bench::{full_lattice, modes};

fn bench_enumerate(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    group.sample_size(20);
    for (kind, sites) in [
        (StateKind::Superfluid, 6u64),
        (StateKind::Superfluid, 8),
        (StateKind::CoherentProduct, 3),
        (StateKind::CoherentProduct, 4),
    ] {
        let (state, _) = full_lattice(kind, sites);
        group.bench_with_input(
            BenchmarkId::new(kind.short_name(), sites),
            &state,
            |b, state| b.iter(|| enumerate(black_box(state), DEFAULT_CUTOFF).unwrap()),
        );
    }
    group.finish();
}

fn bench_d_moments(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_d_moments");
    group.sample_size(10);
    for (kind, sites) in [
        (StateKind::Superfluid, 8u64),
        (StateKind::CoherentProduct, 4),
        (StateKind::CoherentProduct, 5),
    ] {
        let (state, lattice) = full_lattice(kind, sites);
        let dist = enumerate(&state, DEFAULT_CUTOFF).unwrap();
        let (pump, probe) = modes(0.1, true);
        let coeffs = coefficients(&pump, &probe.with_theta(0.7), &lattice).unwrap();
        group.bench_with_input(
            BenchmarkId::new(kind.short_name(), sites),
            &dist,
            |b, dist| b.iter(|| oracle_d_moments(dist, black_box(&coeffs), 0.3).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, bench_enumerate, bench_d_moments);
criterion_main!(benches);
