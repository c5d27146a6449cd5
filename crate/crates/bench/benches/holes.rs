use std::hint::black_box;

use convex_holes::{
    count_holes_of_size, count_holes_of_size_by_masks, largest_hole_bruteforce, largest_hole_dp,
    largest_hole_dp_robust, verify_prop1,
};
use convex_holes_bench::{largest_hole_polygon, square_points};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn largest_hole(c: &mut Criterion) {
    let mut group = c.benchmark_group("largest_hole");
    group.sample_size(10);
    for n in [64, 256, 1024] {
        let ps = square_points(n);
        group.bench_with_input(BenchmarkId::new("dp", n), &ps, |b, ps| {
            b.iter(|| largest_hole_dp(black_box(ps)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("dp_robust", n), &ps, |b, ps| {
            b.iter(|| largest_hole_dp_robust(black_box(ps)).unwrap())
        });
    }
    let small = square_points(14);
    group.bench_function("bruteforce/14", |b| {
        b.iter(|| largest_hole_bruteforce(black_box(&small)).unwrap())
    });
    group.bench_function("dp/14", |b| {
        b.iter(|| largest_hole_dp(black_box(&small)).unwrap())
    });
    group.finish();
}

fn census(c: &mut Criterion) {
    let mut group = c.benchmark_group("census");
    group.sample_size(10);
    let ps = square_points(20);
    for s in [4, 6] {
        group.bench_with_input(BenchmarkId::new("recursive", s), &s, |b, &s| {
            b.iter(|| count_holes_of_size(black_box(&ps), s).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("masks", s), &s, |b, &s| {
            b.iter(|| count_holes_of_size_by_masks(black_box(&ps), s).unwrap())
        });
    }
    group.finish();
}

fn lattice(c: &mut Criterion) {
    let h = largest_hole_polygon(256);
    c.bench_function("verify_prop1/2048", |b| {
        b.iter(|| verify_prop1(black_box(&h), 2048).unwrap())
    });
}

criterion_group!(benches, largest_hole, census, lattice);
criterion_main!(benches);
