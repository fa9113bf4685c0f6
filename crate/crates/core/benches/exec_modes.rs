use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mahler_core::{
    build_table, mahler_integral, z_exp_eval, Exec, PrecisionContext, UnitCirclePoint,
};

fn contexts() -> [(&'static str, PrecisionContext); 2] {
    let base = PrecisionContext::with_digits(30).unwrap();
    [
        ("sequential", base.clone().with_exec(Exec::Sequential)),
        ("parallel", base.with_exec(Exec::Parallel)),
    ]
}

fn table(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_table_1001");
    group.sample_size(10);
    for (name, ctx) in contexts() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &ctx, |b, ctx| {
            b.iter(|| build_table(1001, ctx).unwrap())
        });
    }
    group.finish();
}

fn eta_series(c: &mut Criterion) {
    let mut group = c.benchmark_group("z_exp_eval_400");
    group.sample_size(10);
    for (name, ctx) in contexts() {
        let s = ctx.from_f64(-0.5);
        group.bench_with_input(BenchmarkId::from_parameter(name), &ctx, |b, ctx| {
            b.iter(|| z_exp_eval(&s, 400, ctx).unwrap())
        });
    }
    group.finish();
}

fn quadrature(c: &mut Criterion) {
    let mut group = c.benchmark_group("mahler_integral_k8");
    group.sample_size(10);
    for (name, ctx) in contexts() {
        let tol = ctx.from_f64(1e-20);
        let one = UnitCirclePoint::one(&ctx);
        group.bench_with_input(BenchmarkId::from_parameter(name), &ctx, |b, ctx| {
            b.iter(|| mahler_integral(8, &one, &tol, ctx).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, table, eta_series, quadrature);
criterion_main!(benches);
