use std::hint::black_box;

use charge_lab::{
    almost_disjoint_family, is_absolutely_continuous, lebesgue_decompose, limsup_functional, quasi_disjoint_census,
    ratio, sandwich, usa_test, ChargeFamily, DisjointSeqGen, ElementSequence, EpSet, QuotientSeq,
};
use charge_lab_bench::{alternating_sequence, census_family, mixed_charge, residue_classes, sparse_set};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn sets(c: &mut Criterion) {
    let mut g = c.benchmark_group("epset");
    for period in [6, 60, 420] {
        let a = sparse_set(32, period);
        let b = sparse_set(17, period / 2 + 1);
        g.bench_with_input(BenchmarkId::new("meet", period), &(a.clone(), b.clone()), |bch, (a, b)| {
            bch.iter(|| black_box(a).meet(black_box(b)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("density", period), &a, |bch, a| {
            bch.iter(|| black_box(a).natural_density().unwrap())
        });
    }
    g.finish();
}

fn charges(c: &mut Criterion) {
    let mut g = c.benchmark_group("charge");
    for modulus in [2, 6, 12] {
        let mu = mixed_charge(8, modulus);
        let nu = mixed_charge(3, modulus * 2);
        let probe = sparse_set(10, 15);
        g.bench_function(BenchmarkId::new("evaluate", modulus), |b| b.iter(|| mu.evaluate(black_box(&probe)).unwrap()));
        g.bench_function(BenchmarkId::new("ac-check", modulus), |b| {
            b.iter(|| is_absolutely_continuous(black_box(&mu), black_box(&nu)).unwrap())
        });
        g.bench_function(BenchmarkId::new("decompose", modulus), |b| {
            b.iter(|| lebesgue_decompose(black_box(&mu), black_box(&nu)).unwrap())
        });
    }
    g.finish();
}

fn sequences(c: &mut Criterion) {
    let mut g = c.benchmark_group("sequence");
    let classes = residue_classes(6);
    let alt = alternating_sequence(&classes[0], &classes[3]);
    let tails = ElementSequence::tails(&sparse_set(4, 12));
    let mu = mixed_charge(4, 6);
    g.bench_function("meet", |b| b.iter(|| black_box(&alt).meet(black_box(&tails)).unwrap()));
    g.bench_function("quotient", |b| b.iter(|| QuotientSeq::of(black_box(&alt))));
    g.bench_function("cumulative", |b| b.iter(|| black_box(&tails).cumulative(2, false).unwrap()));
    g.bench_function("limsup", |b| b.iter(|| limsup_functional(black_box(&mu), black_box(&alt)).unwrap()));
    let steady = ElementSequence::constant(classes[1].clone()).with_leading(vec![EpSet::naturals(); 3]).unwrap();
    g.bench_function("sandwich", |b| b.iter(|| sandwich(black_box(&steady), black_box(&mu), &ratio(1, 16)).unwrap()));
    g.finish();
}

fn families(c: &mut Criterion) {
    let mut g = c.benchmark_group("families");
    for k in [4, 16] {
        let branches = almost_disjoint_family(k).unwrap();
        let family = census_family(&branches);
        let nu = mixed_charge(5, 4);
        g.bench_function(BenchmarkId::new("census", k), |b| {
            b.iter(|| quasi_disjoint_census(black_box(&family), black_box(&nu), &ratio(1, 8)).unwrap())
        });
    }
    let list = ChargeFamily::Finite((1..5).map(|m| mixed_charge(m, m)).collect());
    let gens = [DisjointSeqGen::Singletons, DisjointSeqGen::blocks(3).unwrap(), DisjointSeqGen::GeometricBlocks];
    g.bench_function("usa-finite", |b| b.iter(|| usa_test(black_box(&list), &gens).unwrap()));
    let pm = ChargeFamily::point_masses(sparse_set(6, 10)).unwrap();
    g.bench_function("usa-point-masses", |b| b.iter(|| usa_test(black_box(&pm), &gens).unwrap()));
    g.finish();
}

criterion_group!(benches, sets, charges, sequences, families);
criterion_main!(benches);
