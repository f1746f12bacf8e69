use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sepfair_core::cake::approx_mms;
use sepfair_core::exact::exact_mms;
use sepfair_core::fairness::{envy_free_sperner, equitable_bisection};
use sepfair_core::pie::pie_approx_mms;
use sepfair_core::random::{rng, valuation};
use sepfair_core::rational::{pow2_inv, q};
use sepfair_core::{QuerySession, Topology, Valuation};

fn agents(seed: u64, topology: Topology, n: usize, pieces: usize) -> Vec<Valuation> {
    let mut g = rng(seed);
    (0..n).map(|_| valuation(&mut g, topology, pieces, 60, 0)).collect()
}

fn shares(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_mms");
    for d in [3usize, 6, 10] {
        let v = agents(d as u64, Topology::Cake, 1, d).remove(0);
        group.bench_with_input(BenchmarkId::from_parameter(d), &v, |b, v| {
            b.iter(|| exact_mms(black_box(v), 3, &q(1, 10)).unwrap())
        });
    }
    group.finish();

    let v = agents(1, Topology::Cake, 1, 6).remove(0);
    c.bench_function("approx_mms/2^-30", |b| {
        b.iter(|| approx_mms(&mut QuerySession::new(v.clone()), 3, &q(1, 10), &pow2_inv(30)).unwrap())
    });

    let v = agents(2, Topology::Pie, 1, 6).remove(0);
    c.bench_function("pie_approx_mms/1e-3", |b| {
        b.iter(|| pie_approx_mms(&mut QuerySession::new(v.clone()), 3, &q(1, 10), &q(1, 1000)).unwrap())
    });
}

fn allocations(c: &mut Criterion) {
    let mut group = c.benchmark_group("fair_allocations");
    group.sample_size(10);
    for n in [2usize, 3] {
        let vs = agents(10 + n as u64, Topology::Cake, n, 4);
        let order: Vec<usize> = (0..n).collect();
        group.bench_with_input(BenchmarkId::new("equitable", n), &vs, |b, vs| {
            b.iter(|| equitable_bisection(vs, &q(1, 20), &order, &q(1, 1_000_000_000)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("envy_free", n), &vs, |b, vs| {
            b.iter(|| envy_free_sperner(vs, &q(1, 20), &q(1, 1_000_000)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, shares, allocations);
criterion_main!(benches);
