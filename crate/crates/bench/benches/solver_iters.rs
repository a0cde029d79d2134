//! Cost of full solver runs on one blended quadratic + ℓ1 instance
//! (n = m = 150), comparing the per-iteration price of the diagonal Newton
//! metric against the scalar and diagonal secant baselines.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pdnm_core::datagen::{gen_blend_quadratic, BlendSpec};
use pdnm_core::solvers::{
    pdnm_run, pdnm_step, pgm_bb_run, pgm_dbb_run, PdnmConfig, PgmBbConfig, PgmDbbConfig,
};
use pdnm_core::{ProblemInstance, Vector};

fn instance() -> ProblemInstance {
    gen_blend_quadratic(&BlendSpec {
        n: 150,
        m: 150,
        lambda_blend: 0.5,
        seed: 9,
        lambda_reg: 1.0,
        ..BlendSpec::default()
    })
    .expect("spec is valid")
}

fn bench_solvers(c: &mut Criterion) {
    let p = instance();
    let x0 = Vector::zeros(p.dim());
    // Fixed iteration budget so every run prices the same number of steps.
    let budget = 30;

    let mut group = c.benchmark_group("blend_n150");

    group.bench_function("pdnm_step", |b| {
        let cfg = PdnmConfig::default();
        b.iter(|| pdnm_step(&p, black_box(&x0), &cfg));
    });
    group.bench_function("pdnm_30_iters", |b| {
        let cfg = PdnmConfig {
            eps: 0.0,
            t_max: budget,
            ..PdnmConfig::default()
        };
        b.iter(|| pdnm_run(&p, black_box(&x0), &cfg));
    });
    group.bench_function("pgm_bb_30_iters", |b| {
        let cfg = PgmBbConfig {
            eps: 0.0,
            t_max: budget,
            ..PgmBbConfig::default()
        };
        b.iter(|| pgm_bb_run(&p, black_box(&x0), &cfg));
    });
    group.bench_function("pgm_dbb_30_iters", |b| {
        let cfg = PgmDbbConfig {
            eps: 0.0,
            t_max: budget,
            ..PgmDbbConfig::default()
        };
        b.iter(|| pgm_dbb_run(&p, black_box(&x0), &cfg));
    });

    group.finish();
}

criterion_group!(benches, bench_solvers);
criterion_main!(benches);
