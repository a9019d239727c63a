use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use erange_core::*;
use std::hint::black_box;

fn bench_riccati(c: &mut Criterion) {
    let xs: Vec<f64> = (1..=200).map(|i| 0.05 * i as f64).collect();
    c.bench_function("riccati_bessel l=2, 200 points", |b| {
        b.iter(|| {
            for &x in &xs {
                black_box(riccati_bessel(2, black_box(x)).unwrap());
            }
        })
    });
}

fn bench_solve_regular(c: &mut Criterion) {
    let pot = PotentialSpec::PowerTail { amplitude: 1.0, core: 1.0, exponent_s: 6.0 };
    let grid = RadialGrid::build(&pot, &GridSpec::recommended(&pot, 1.0).unwrap()).unwrap();
    c.bench_function("solve_regular power tail k=1", |b| {
        b.iter(|| black_box(solve_regular(&pot, 1.0, 0, &grid).unwrap()))
    });
    // chi0 needs a grid reaching the 1e-10 tail criterion
    let deep = RadialGrid::build(&pot, &GridSpec::new(pot.required_radius(1e-10, 1))).unwrap();
    c.bench_function("solve_zero_bounded power tail l=1", |b| {
        b.iter(|| black_box(solve_zero_bounded(&pot, 1, &deep).unwrap()))
    });
}

fn bench_phase_shift(c: &mut Criterion) {
    let pot = PotentialSpec::SquareBarrier { height: 4.0, radius: 1.0 };
    let grid = RadialGrid::build(&pot, &GridSpec::recommended(&pot, 2.0).unwrap()).unwrap();
    c.bench_function("phase_shift_integral barrier k=2", |b| {
        b.iter(|| black_box(phase_shift_integral(&pot, 2.0, 0, &grid).unwrap()))
    });
    let ks: Vec<f64> = (1..=10).map(|i| 0.2 * i as f64).collect();
    c.bench_function("matching curve barrier, 10 momenta", |b| {
        b.iter_batched(
            || ks.clone(),
            |ks| {
                black_box(
                    phase_shift_curve(&pot, 0, &ks, &grid, PhaseMethod::AsymptoticMatching)
                        .unwrap(),
                )
            },
            BatchSize::SmallInput,
        )
    });
}

fn bench_observables(c: &mut Criterion) {
    let pot = PotentialSpec::SquareBarrier { height: 4.0, radius: 1.0 };
    let grid = RadialGrid::build(&pot, &GridSpec::recommended(&pot, 0.0).unwrap()).unwrap();
    c.bench_function("effective_range_direct barrier", |b| {
        b.iter(|| black_box(effective_range_direct(&pot, 0, &grid).unwrap()))
    });
}

criterion_group!(benches, bench_riccati, bench_solve_regular, bench_phase_shift, bench_observables);
criterion_main!(benches);
