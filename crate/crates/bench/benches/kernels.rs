use std::hint::black_box;

use bttn_core::analytic;
use bttn_core::montecarlo::{self, McConfig};
use bttn_core::specfun::{self, QuadSpec};
use bttn_core::SystemParams;
use criterion::{criterion_group, criterion_main, Criterion};

fn special_functions(c: &mut Criterion) {
    c.bench_function("meijer_g_ber k=2.5 theta=40", |b| {
        b.iter(|| specfun::meijer_g_ber(black_box(2.5), black_box(40.0)))
    });
    c.bench_function("meijer_g_ac k=2.5 theta=40", |b| {
        b.iter(|| specfun::meijer_g_ac(black_box(2.5), black_box(40.0)))
    });
    let spec = QuadSpec::default().relative_only();
    c.bench_function("expect_under_gamma Q(sqrt(2g))", |b| {
        b.iter(|| {
            specfun::expect_under_gamma(
                |g| specfun::q_function((2.0 * g).sqrt()),
                black_box(2.5),
                black_box(40.0),
                &spec,
            )
        })
    });
    c.bench_function("reg_lower_inc_gamma", |b| {
        b.iter(|| specfun::reg_lower_inc_gamma(black_box(7.3), black_box(5.1)))
    });
}

fn pipeline(c: &mut Criterion) {
    let params = SystemParams::default();
    c.bench_function("analytic_metrics defaults", |b| {
        b.iter(|| analytic::analytic_metrics(black_box(&params)))
    });
    let cfg = McConfig {
        n_trials: 10_000,
        ..McConfig::default()
    };
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(20);
    group.bench_function("10k trials N=20", |b| {
        b.iter(|| montecarlo::estimate_metrics(black_box(&params), &cfg))
    });
    group.finish();
}

criterion_group!(benches, special_functions, pipeline);
criterion_main!(benches);
