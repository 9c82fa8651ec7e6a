use std::hint::black_box;

use bisync::linalg::hermitian_eig;
use bisync::quantum_perm::random::{random_block_pair, random_permutation_mixture, random_quantum_permutation};
use bisync::{fix_equivalence_check, kraus_from_choi, local_bisync_membership, phi_from_density, Density};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("hermitian_eig");
    for n in [3, 4, 6] {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let mix = random_permutation_mixture(&mut rng, n, 6);
        let choi = phi_from_density(&mix.to_density()).unwrap().choi().clone();
        group.bench_with_input(BenchmarkId::new("choi", n * n), &choi, |b, m| {
            b.iter(|| hermitian_eig(black_box(m), TOL).unwrap())
        });
    }
    group.finish();
}

fn membership(c: &mut Criterion) {
    let mut group = c.benchmark_group("local_bisync_membership");
    group.sample_size(20);
    for n in [3, 4, 5] {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + n as u64);
        let d = random_permutation_mixture(&mut rng, n, 8).to_density();
        group.bench_with_input(BenchmarkId::new("mixture", n), &d, |b, d| {
            b.iter(|| local_bisync_membership(black_box(d), TOL).unwrap())
        });
    }
    let z3 = Density::z3_counterexample();
    group.bench_function("z3", |b| b.iter(|| local_bisync_membership(black_box(&z3), TOL).unwrap()));
    group.finish();
}

fn channels(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let u = random_block_pair(&mut rng, 3);
    let phi = phi_from_density(&u.induced_density()).unwrap();
    c.bench_function("kraus_from_choi/block_pair", |b| b.iter(|| kraus_from_choi(black_box(&phi), TOL).unwrap()));

    let mut group = c.benchmark_group("fix_equivalence_check");
    group.sample_size(10);
    for seed in 0..3u64 {
        let (kind, u) = random_quantum_permutation(&mut ChaCha8Rng::seed_from_u64(seed), 6, 4);
        let d = u.induced_density();
        let id = format!("{kind:?}/n{}d{}", u.n(), u.total_dim());
        group.bench_function(id, |b| b.iter(|| fix_equivalence_check(black_box(&u), &d, TOL).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, eigensolver, membership, channels);
criterion_main!(benches);
