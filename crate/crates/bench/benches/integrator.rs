use criterion::{black_box, criterion_group, criterion_main, Criterion};

use h3mag::dynamics::{lorentz_rhs, State, SystemKind};
use h3mag::geometry::{KillingTag, ModelParams};
use h3mag::integrate::{integrate, IntegratorConfig, Method};

fn bench_rhs(c: &mut Criterion) {
    let p = ModelParams::new(1.0).unwrap();
    let s = State::new(0.3, -0.2, 0.1, 0.7, 0.4, -0.5);
    let systems = [
        SystemKind::Geodesic,
        SystemKind::magnetic(KillingTag::K1),
        SystemKind::magnetic(KillingTag::K4),
    ];
    let mut g = c.benchmark_group("lorentz_rhs");
    for sys in systems {
        g.bench_function(sys.label(), |b| {
            b.iter(|| lorentz_rhs(black_box(&p), black_box(&sys), black_box(&s)))
        });
    }
    g.finish();
}

fn bench_integrate(c: &mut Criterion) {
    let p = ModelParams::new(1.0).unwrap();
    let s0 = State::new(0.1, 0.2, 0.0, 0.8, -0.3, 0.4);
    let sys = SystemKind::magnetic(KillingTag::K2);

    let mut g = c.benchmark_group("integrate_unit_span");
    g.bench_function("embedded45_1e-10", |b| {
        let cfg = IntegratorConfig::embedded(0.0, 1.0, 0.1);
        b.iter(|| integrate(black_box(&p), &sys, black_box(&s0), &cfg).unwrap())
    });
    g.bench_function("fixed_rk4_1e-3", |b| {
        let cfg = IntegratorConfig {
            method: Method::FixedRk4 { step: 1e-3 },
            t_start: 0.0,
            t_end: 1.0,
            max_steps: 1_000_000,
            sample_every: 0.1,
        };
        b.iter(|| integrate(black_box(&p), &sys, black_box(&s0), &cfg).unwrap())
    });
    g.finish();
}

criterion_group!(benches, bench_rhs, bench_integrate);
criterion_main!(benches);
