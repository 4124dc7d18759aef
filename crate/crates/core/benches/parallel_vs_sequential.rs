use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hardy_lab::constants::HardyParams;
use hardy_lab::geometry::{ball_volume, Geometry, GroupSpec, QuasiNormSpec, SphereMeasure};
use hardy_lab::operators::{group_ratio_montecarlo, group_ratio_radial};
use hardy_lab::parallel::map_slice;
use hardy_lab::profile::random_smooth;
use hardy_lab::quadrature::RadialGrid;
use hardy_lab::{Execution, MonteCarlo};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20261016;
const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn ball(c: &mut Criterion) {
    let group = GroupSpec::heisenberg();
    let norm = QuasiNormSpec::koranyi();
    let mut g = c.benchmark_group("ball_volume_koranyi_1e6");
    g.sample_size(10);
    for (name, exec) in MODES {
        let mc = MonteCarlo::new(1_000_000, SEED).with_execution(exec);
        g.bench_function(name, |b| {
            b.iter(|| ball_volume(&group, &norm, 1.0, black_box(&mc)).unwrap())
        });
    }
    g.finish();
}

fn nested(c: &mut Criterion) {
    let geo = Geometry::new(GroupSpec::euclidean(2).unwrap(), QuasiNormSpec::euclidean()).unwrap();
    let params = HardyParams::scaled(2.0, 3.0, 0.5, 2.0).unwrap();
    let sphere = SphereMeasure::exact(2.0 * std::f64::consts::PI);
    let u = |x: &[f64]| (1.0 - x[0] * x[0] - x[1] * x[1]).max(0.0) * (1.0 + 0.3 * x[0]);
    let mut g = c.benchmark_group("group_ratio_montecarlo_r2");
    g.sample_size(10);
    for (name, exec) in MODES {
        let mc = MonteCarlo::new(10_000, SEED)
            .with_execution(exec)
            .with_chunk_size(256);
        g.bench_function(name, |b| {
            b.iter(|| {
                group_ratio_montecarlo(&u, 1.0, &params, &geo, &sphere, black_box(&mc)).unwrap()
            })
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let grid = RadialGrid::default_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let profiles: Vec<_> = (0..64)
        .map(|_| random_smooth(&mut rng).sample(&grid))
        .collect();
    let params = HardyParams::scaled(2.0, 4.0, 0.0, 4.0).unwrap();
    let mut g = c.benchmark_group("radial_ratio_sweep");
    for (name, exec) in MODES {
        g.bench_with_input(
            BenchmarkId::new(name, profiles.len()),
            &profiles,
            |b, ps| {
                b.iter(|| {
                    map_slice(exec, ps, |u| {
                        group_ratio_radial(u, &params, 4.0, 19.74).unwrap().ratio
                    })
                })
            },
        );
    }
    g.finish();
}

criterion_group!(benches, ball, nested, sweep);
criterion_main!(benches);
