use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use cmtext::geometry::{offset_polygon, polar_min_distance, ray_distances, sample_centers, Point};
use cmtext::synth::{annular_sector, rotated_rect};

fn bench(c: &mut Criterion) {
    let rect = rotated_rect(Point::new(200.0, 200.0), 240.0, 48.0, 0.3).unwrap();
    let sector = annular_sector(Point::new(200.0, 300.0), 120.0, 160.0, -2.2, -0.9).unwrap();
    for (name, poly) in [("rotated_rect", &rect), ("sector", &sector)] {
        let p = sample_centers(poly, 1).unwrap()[0].point;
        let d = sample_centers(poly, 1).unwrap()[0].pmd;
        let mut g = c.benchmark_group(name);
        g.bench_function("pmd", |b| b.iter(|| polar_min_distance(black_box(poly), black_box(p)).unwrap()));
        g.bench_function("rays", |b| b.iter(|| ray_distances(black_box(poly), black_box(p)).unwrap()));
        g.bench_function("centers_5", |b| b.iter(|| sample_centers(black_box(poly), 5).unwrap()));
        g.bench_function("shrink", |b| b.iter(|| offset_polygon(black_box(poly), -0.5 * d)));
        g.bench_function("expand", |b| b.iter(|| offset_polygon(black_box(poly), 0.5 * d)));
        g.finish();
    }
}

criterion_group!(benches, bench);
criterion_main!(benches);
