use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use greenrep::oned::{enclose_1d, EpsRule};
use greenrep::{enclose_point, MfsConfig, PiecewiseSource1D, Point, QuadConfig, SourceExpr};
use greenrep_bench::square;

fn oned(c: &mut Criterion) {
    let f = PiecewiseSource1D::new(vec![0.25], vec![SourceExpr::constant(1.0), SourceExpr::constant(1.125)]).unwrap();
    for k in [5, 7] {
        let h = 2f64.powi(-k);
        c.bench_function(&format!("oned/jump_h2^-{k}"), |b| {
            b.iter(|| enclose_1d(black_box(&f), h, 0.2 * 1.125 * h * h, EpsRule::default()))
        });
    }
}

fn twod(c: &mut Criterion) {
    let mut g = c.benchmark_group("twod");
    g.sample_size(10).measurement_time(Duration::from_secs(20));
    let sq = square();
    let one = SourceExpr::constant(1.0);
    g.bench_function("square_f1_origin", |b| {
        b.iter(|| {
            enclose_point(&sq, black_box(&one), None, Point::new(0.0, 0.0), &MfsConfig::default(), &QuadConfig::default())
        })
    });
    g.finish();
}

criterion_group!(benches, oned, twod);
criterion_main!(benches);
