use batchrec::measurement::{ColumnHandle, Ledger};
use batchrec::primitives::{estimate_l1, sparse_recover};
use batchrec::{batch_recover_const, batch_recover_eps, optimal_tail_error, RecoveryConfig};
use batchrec_bench::planted_fixture;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("batch");
    for &(n, m, k) in &[(128, 16, 2), (256, 64, 4)] {
        let a = planted_fixture(n, m, k);
        let label = format!("{n}x{m}k{k}");
        for (name, cfg) in [
            ("idealized", RecoveryConfig::with_seed(1)),
            ("sketch", RecoveryConfig::sketch(1)),
        ] {
            group.bench_with_input(
                BenchmarkId::new(format!("const/{name}"), &label),
                &a,
                |b, a| {
                    b.iter(|| {
                        let ledger = Ledger::new(a.m());
                        let handles = ColumnHandle::all(a, &ledger).unwrap();
                        black_box(batch_recover_const(&handles, k, &cfg).unwrap())
                    })
                },
            );
        }
        group.bench_with_input(BenchmarkId::new("eps/idealized", &label), &a, |b, a| {
            let cfg = RecoveryConfig::with_seed(1);
            b.iter(|| {
                let ledger = Ledger::new(a.m());
                let handles = ColumnHandle::all(a, &ledger).unwrap();
                black_box(batch_recover_eps(&handles, k, 0.25, &cfg).unwrap())
            })
        });
    }
    group.finish();
}

fn primitives(c: &mut Criterion) {
    let a = planted_fixture(256, 1, 8);
    let sketch = RecoveryConfig::sketch(3);
    c.bench_function("sketch_recover/n256s16", |b| {
        b.iter(|| {
            let ledger = Ledger::new(1);
            let handles = ColumnHandle::all(&a, &ledger).unwrap();
            ledger
                .in_round(|| black_box(sparse_recover(&handles[0], 16, 0.5, &sketch)))
                .unwrap()
        })
    });
    c.bench_function("estimate_l1/n256", |b| {
        b.iter(|| {
            let ledger = Ledger::new(1);
            let handles = ColumnHandle::all(&a, &ledger).unwrap();
            ledger
                .in_round(|| black_box(estimate_l1(&handles[0], &sketch)))
                .unwrap()
        })
    });
    let big = planted_fixture(1000, 1000, 4);
    c.bench_function("optimal_tail_error/1e6", |b| {
        b.iter(|| black_box(optimal_tail_error(&big, 4).unwrap()))
    });
}

criterion_group!(benches, batch, primitives);
criterion_main!(benches);
