use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hmf_core::analysis::{pointwise_scan, ExponentMode, LeaderMode};
use hmf_core::group::mc_unit_ball_volume;
use hmf_core::lattice::index::parity_scan_irreducible;
use hmf_core::lattice::neighbors::ball_overlap_oracle;
use hmf_core::par::chunk_rng;
use hmf_core::synthesis::besov::besov_coefficient_brute;
use hmf_core::synthesis::{besov_saturating_field, BesovParams};
use hmf_core::{ExecPolicy, GPoint};
use rand::Rng;

const POLICIES: [(&str, ExecPolicy); 2] = [("seq", ExecPolicy::Sequential), ("par", ExecPolicy::Parallel)];

fn lattice_scans(c: &mut Criterion) {
    let mut g = c.benchmark_group("lattice");
    g.sample_size(10);
    for (name, pol) in POLICIES {
        g.bench_with_input(BenchmarkId::new("parity_scan_J4", name), &pol, |b, &pol| {
            b.iter(|| parity_scan_irreducible(black_box(4), pol))
        });
        g.bench_with_input(BenchmarkId::new("ball_overlap", name), &pol, |b, &pol| b.iter(|| ball_overlap_oracle(pol)));
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut g = c.benchmark_group("monte_carlo");
    g.sample_size(10);
    for (name, pol) in POLICIES {
        g.bench_with_input(BenchmarkId::new("unit_ball_1e6", name), &pol, |b, &pol| {
            b.iter(|| mc_unit_ball_volume(black_box(1_000_000), 3, pol))
        });
    }
    g.finish();
}

fn field_scans(c: &mut Criterion) {
    let p = BesovParams::new(2.0, 2.0, 2.0).unwrap();
    let f = besov_saturating_field(p);
    let mut rng = chunk_rng(1, 0);
    let pts: Vec<GPoint> = (0..64).map(|_| GPoint::new(rng.random(), rng.random(), rng.random())).collect();
    let mut g = c.benchmark_group("fields");
    g.sample_size(10);
    for (name, pol) in POLICIES {
        g.bench_with_input(BenchmarkId::new("brute_a_j5", name), &pol, |b, &pol| {
            b.iter(|| besov_coefficient_brute(&f, &p, black_box(5), pol).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("pointwise_scan_64", name), &pol, |b, &pol| {
            b.iter(|| pointwise_scan(&f, &pts, (4, 16), ExponentMode::Fit { beta: p.beta() }, LeaderMode::Exact, pol))
        });
    }
    g.finish();
}

criterion_group!(benches, lattice_scans, monte_carlo, field_scans);
criterion_main!(benches);
