use std::hint::black_box;

use coinwalk::{
    certify_schedule, dense_evolve, plan_complete, plan_cycle, plan_line, plan_regular, run_teleport, run_transfer,
    Complex64, DensePlan, TeleportPlan,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn payload(dim: usize) -> Vec<Complex64> {
    let norm = (dim as f64).sqrt();
    (0..dim).map(|k| Complex64::from_polar(1.0 / norm, 0.7 * k as f64)).collect()
}

fn transfer(c: &mut Criterion) {
    let mut g = c.benchmark_group("transfer");
    for x in [8i64, 64, 256] {
        let plan = plan_line(x).unwrap();
        let p = payload(2);
        g.bench_with_input(BenchmarkId::new("line", x), &plan, |b, plan| {
            b.iter(|| run_transfer(black_box(plan), &p).unwrap())
        });
    }
    for d in [8usize, 32] {
        let plan = plan_cycle(d, (d / 2) as i64 - 1, 3).unwrap();
        let p = payload(2);
        g.bench_with_input(BenchmarkId::new("cycle_m3", d), &plan, |b, plan| {
            b.iter(|| run_transfer(black_box(plan), &p).unwrap())
        });
    }
    for d in [5usize, 16] {
        let plan = plan_complete(d, 1).unwrap();
        let p = payload(d);
        g.bench_with_input(BenchmarkId::new("complete", d), &plan, |b, plan| {
            b.iter(|| run_transfer(black_box(plan), &p).unwrap())
        });
    }
    let plan = plan_regular(15, 4, 7).unwrap();
    let p = payload(4);
    g.bench_function("regular_n15_d4", |b| b.iter(|| run_transfer(black_box(&plan), &p).unwrap()));
    g.finish();
}

fn teleport(c: &mut Criterion) {
    let mut g = c.benchmark_group("teleport");
    let cases = [
        ("line", TeleportPlan::line(2).unwrap(), 2),
        ("cycle_d8", TeleportPlan::cycle(8).unwrap(), 2),
        ("complete_d5", TeleportPlan::complete(5, 2).unwrap(), 5),
        ("regular_n12_d4", TeleportPlan::regular(12, 4, 5).unwrap(), 4),
    ];
    for (name, plan, dim) in &cases {
        let p = payload(*dim);
        g.bench_function(*name, |b| b.iter(|| run_teleport(black_box(plan), &p).unwrap()));
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    g.sample_size(20);
    let plan = plan_line(12).unwrap();
    let p = payload(2);
    g.bench_function("dense_line_x12", |b| b.iter(|| dense_evolve(DensePlan::Transfer(black_box(&plan)), &p).unwrap()));
    let plan = plan_complete(6, 2).unwrap();
    let p = payload(6);
    g.bench_function("dense_complete_d6", |b| {
        b.iter(|| dense_evolve(DensePlan::Transfer(black_box(&plan)), &p).unwrap())
    });
    let plan = plan_cycle(10, 3, 4).unwrap();
    g.bench_function("certify_cycle_d10", |b| b.iter(|| certify_schedule(black_box(&plan), 8, 1).unwrap()));
    g.finish();
}

criterion_group!(benches, transfer, teleport, oracle);
criterion_main!(benches);
