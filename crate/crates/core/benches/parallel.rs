//! Sequential vs parallel execution of the data-parallel kernels.
//!
//! Without the `parallel` feature both variants run the sequential loop.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use schmidt_core::certify::theorem1_constant_with;
use schmidt_core::escape::{select_cap, SelectConfig};
use schmidt_core::geometry::{cap_fraction_monte_carlo, Ball, Hyperplane, Point};
use schmidt_core::par::Execution;
use schmidt_core::rational::{q, qi};
use schmidt_core::resonance::{psi_records, ThetaMatrix};
use schmidt_core::schedule::derive_params;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn theorem1(c: &mut Criterion) {
    let mut group = c.benchmark_group("theorem1_constant");
    let theta = ThetaMatrix::new(vec![vec![q(832040, 1346269)], vec![q(3, 7)]]).unwrap();
    let eta = [q(1, 3)];
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "m=2,N=150"), &exec, |b, &exec| {
            b.iter(|| theorem1_constant_with(black_box(&theta), &eta, 150, exec).unwrap())
        });
    }
    group.finish();
}

fn records(c: &mut Criterion) {
    let mut group = c.benchmark_group("psi_records");
    let theta = ThetaMatrix::new(vec![vec![q(2, 7), q(5, 11)]]).unwrap();
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "n=2,t=60"), &exec, |b, &exec| {
            b.iter(|| psi_records(black_box(&theta), 60, exec))
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("cap_fraction_monte_carlo");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "n=3,2^18"), &exec, |b, &exec| {
            b.iter(|| cap_fraction_monte_carlo(black_box(0.625), 3, 1 << 18, 7, exec))
        });
    }
    group.finish();
}

fn selection(c: &mut Criterion) {
    let mut group = c.benchmark_group("select_cap");
    group.sample_size(10);
    let params = derive_params(&q(1, 4), &q(1, 2), &qi(3), 2).unwrap();
    let ball = Ball::new(Point::new(vec![q(1, 3), q(-2, 5)]), q(1, 2)).unwrap();
    let planes: Vec<Hyperplane> = (1..=12i64)
        .filter_map(|i| Hyperplane::from_i64(&[i % 5 - 2, 3 - i % 4], i % 2).ok())
        .collect();
    for (name, exec) in MODES {
        let config = SelectConfig {
            exec,
            ..SelectConfig::default()
        };
        group.bench_with_input(BenchmarkId::new(name, "n=2,12 planes"), &config, |b, config| {
            b.iter(|| select_cap(black_box(&ball), &planes, &params, config).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, theorem1, records, monte_carlo, selection);
criterion_main!(benches);
