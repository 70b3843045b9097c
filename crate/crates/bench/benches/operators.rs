use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use tlq_bench::{cylinder, sphere};
use tlq_core::dynamics::Evolver;
use tlq_core::{
    build_grid, force_heisenberg, run_suite, BandKind, Chart, OperatorSet, PhysParams,
};

fn grid_construction(c: &mut Criterion) {
    let chart = Chart::sphere(1.0, PhysParams::default()).unwrap();
    let mut group = c.benchmark_group("build_grid");
    for n in [8, 16, 24] {
        group.bench_with_input(BenchmarkId::new("sphere", n), &n, |b, &n| {
            b.iter(|| build_grid(&chart, black_box(n), 2 * n).unwrap())
        });
    }
    group.finish();
}

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assembly");
    group.sample_size(10);
    for n in [8, 16] {
        let g = sphere(n);
        group.bench_with_input(BenchmarkId::new("operator_set", n), &g, |b, g| {
            b.iter(|| OperatorSet::build(g).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("force_heisenberg", n), &g, |b, g| {
            b.iter(|| force_heisenberg(g).unwrap())
        });
    }
    group.finish();
}

fn hermiticity(c: &mut Criterion) {
    let g = sphere(16);
    let ops = OperatorSet::build(&g).unwrap();
    let band = g.band(BandKind::Test);
    c.bench_function("hermiticity_residual/H/16x32", |b| {
        b.iter(|| ops.hamiltonian.hermiticity_residual(black_box(&band)))
    });
}

fn suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_suite");
    group.sample_size(10);
    let s = sphere(12);
    group.bench_function("sphere/12x24", |b| b.iter(|| run_suite(&s, 7).unwrap()));
    let cy = cylinder(16);
    group.bench_function("cylinder/16x16", |b| b.iter(|| run_suite(&cy, 7).unwrap()));
    group.finish();
}

fn evolution(c: &mut Criterion) {
    let g = sphere(12);
    let ops = OperatorSet::build(&g).unwrap();
    let ev = Evolver::with_operators(&ops).unwrap();
    let psi = g.test_states(1, 3).remove(0);
    c.bench_function("evolve/12x24/1000_steps", |b| {
        b.iter(|| ev.run(black_box(&psi), 0.01, 1000).unwrap())
    });
}

criterion_group!(benches, grid_construction, assembly, hermiticity, suite, evolution);
criterion_main!(benches);
