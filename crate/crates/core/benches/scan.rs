use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use disslab::riemann::solve_middle_state;
use disslab::solver::{scan, Grid, GridRange, SolveOptions};
use disslab::weakform::{check_family, FanField, QuadratureOptions, TestFunction};
use disslab::{Execution, GasLaw, RiemannData};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_scan(c: &mut Criterion) {
    let law = GasLaw::new(2.0).unwrap();
    let data = RiemannData::normal(2.0, 1.0, 1.0, -2.0).unwrap();
    let grid = Grid { rho1: GridRange::new(2.05, 2.88, 40), c: GridRange::new(0.01, 1.0, 40) };
    let mut group = c.benchmark_group("scan_40x40");
    for (name, execution) in MODES {
        let opts = SolveOptions { execution, ..SolveOptions::default() };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| scan(&data, &law, &grid, 1.0, &opts).unwrap())
        });
    }
    group.finish();
}

fn bench_weak_form(c: &mut Criterion) {
    let law = GasLaw::new(2.0).unwrap();
    let data = RiemannData::normal(2.0, 1.0, 1.0, -2.0).unwrap();
    let shock = solve_middle_state(&data, &law).unwrap();
    let field = FanField::self_similar(&data, &law, &shock);
    let family = TestFunction::family(7, 50, true);
    let opts = QuadratureOptions::default();
    let mut group = c.benchmark_group("check_family_50");
    group.sample_size(20);
    for (name, execution) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| check_family(&field, &family, &opts, execution).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_scan, bench_weak_form);
criterion_main!(benches);
