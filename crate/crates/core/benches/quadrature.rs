use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use holoherm::hermite::{psi_s_fn, SParam};
use holoherm::quadrature::{integrate_plane, Decay, Execution, GaussianEnvelope, PlanarGrid};
use holoherm::spaces::{gram_matrix_on, WeightSpec};
use holoherm::Complex64;

fn modes() -> Vec<(&'static str, Execution)> {
    #[cfg(feature = "parallel")]
    return vec![
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ];
    #[cfg(not(feature = "parallel"))]
    vec![("sequential", Execution::Sequential)]
}

fn plane(c: &mut Criterion) {
    let env = GaussianEnvelope::from_decay(Decay::new(0.75, 0.2, 0.5)).unwrap();
    let f = |z: Complex64| {
        (Complex64::new(0.1, 0.3) * z * z
            - 0.75 * z.re * z.re
            - 0.2 * z.re * z.im
            - 0.5 * z.im * z.im)
            .exp()
    };
    let mut group = c.benchmark_group("integrate_plane_201");
    for (name, exec) in modes() {
        let grid = PlanarGrid::with_nodes(201, env)
            .unwrap()
            .with_execution(exec);
        group.bench_with_input(BenchmarkId::from_parameter(name), &grid, |b, g| {
            b.iter(|| integrate_plane(f, black_box(g)).unwrap())
        });
    }
    group.finish();
}

fn gram(c: &mut Criterion) {
    let s = SParam::new(0.5).unwrap();
    let spec = WeightSpec::Xs(s);
    let env = GaussianEnvelope::from_decay(spec.decay() + Decay::new(1.0, 0.0, -1.0)).unwrap();
    let mut group = c.benchmark_group("gram_psi_13");
    group.sample_size(10);
    for (name, exec) in modes() {
        let grid = PlanarGrid::with_nodes(201, env)
            .unwrap()
            .with_execution(exec);
        group.bench_with_input(BenchmarkId::from_parameter(name), &grid, |b, g| {
            b.iter(|| gram_matrix_on(|n| psi_s_fn(n, s), 13, &spec, black_box(g)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, plane, gram);
criterion_main!(benches);
