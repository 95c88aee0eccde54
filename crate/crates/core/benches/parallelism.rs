//! Parallel-versus-serial timings for the enumeration and sweep layers.
//!
//! Each pair benches the same computation through the rayon path (the
//! `*` names; a no-op difference when the `parallel` feature is off) and
//! the always-sequential `*_serial` variant.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lrc_core::catalog::example1;
use lrc_core::code_model::{code_from_generator, weight_enumerator, weight_enumerator_serial, LinearCode};
use lrc_core::field_core::FieldMatrix;
use lrc_core::locality_analysis::{zeta_max, zeta_max_serial};
use lrc_core::lp_bounds::{bound_sweep, bound_sweep_serial};
use lrc_core::Limits;

/// A reproducible dense binary [26, 13] code: large enough that the
/// 2^13-word scan dominates, small enough to keep the suite quick.
fn random_code() -> LinearCode {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_be4c);
    loop {
        let rows: Vec<Vec<u64>> = (0..13).map(|_| (0..26).map(|_| rng.gen_range(0..2)).collect()).collect();
        let m = FieldMatrix::from_rows(2, &rows).unwrap();
        if let Ok(c) = code_from_generator(&m) {
            if c.k() == 13 {
                return c;
            }
        }
    }
}

fn bench_weight_enumerator(c: &mut Criterion) {
    let code = random_code();
    let limits = Limits::default();
    let mut group = c.benchmark_group("weight_enumerator");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| weight_enumerator(black_box(&code), &limits).unwrap())
    });
    group.bench_function("serial", |b| {
        b.iter(|| weight_enumerator_serial(black_box(&code), &limits).unwrap())
    });
    group.finish();
}

fn bench_zeta_scan(c: &mut Criterion) {
    let code = example1();
    let limits = Limits::default();
    let mut group = c.benchmark_group("zeta_max_16_nodes");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| zeta_max(black_box(&code), 3, 2, &limits).unwrap())
    });
    group.bench_function("serial", |b| {
        b.iter(|| zeta_max_serial(black_box(&code), 3, 2, &limits).unwrap())
    });
    group.finish();
}

fn bench_bound_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("bound_sweep_8");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| bound_sweep(black_box(8), 2, 3, 1..=7, &[0, 1, 2], &[2, 4, 7]))
    });
    group.bench_function("serial", |b| {
        b.iter(|| bound_sweep_serial(black_box(8), 2, 3, 1..=7, &[0, 1, 2], &[2, 4, 7]))
    });
    group.finish();
}

criterion_group!(benches, bench_weight_enumerator, bench_zeta_scan, bench_bound_sweep);
criterion_main!(benches);
