use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use relyroute_bench::sixteen_node_overlay;
use relyroute_core::reliability::reliability_at;
use relyroute_core::*;

fn cut_counts(c: &mut Criterion) {
    let (physical, dart, atr) = fixture_fig2();
    let mut group = c.benchmark_group("cut_counts");
    for (name, g) in [
        ("fig2_physical", &physical),
        ("fig2_dart", &dart),
        ("fig2_atr", &atr),
    ] {
        group.bench_with_input(BenchmarkId::from_parameter(name), g, |b, g| {
            b.iter(|| enumerate_cut_counts(black_box(g), 0, 7).unwrap())
        });
    }
    for n in [6usize, 8, 10] {
        let mesh = topology::full_mesh(n).unwrap();
        group.bench_with_input(BenchmarkId::new("full_mesh", n), &mesh, |b, g| {
            b.iter(|| enumerate_cut_counts(black_box(g), 0, n - 1).unwrap())
        });
    }
    group.finish();
}

fn single_p(c: &mut Criterion) {
    let (_, dart) = sixteen_node_overlay(1, Mode::Dart);
    c.bench_function("reliability_at/16_node_dart", |b| {
        b.iter(|| reliability_at(black_box(&dart), 0, 15, 0.5, &EnumConfig::default()).unwrap())
    });
}

fn network_mean(c: &mut Criterion) {
    let (_, dart) = sixteen_node_overlay(1, Mode::Dart);
    let grid: Vec<f64> = (1..=19).map(|k| k as f64 * 0.05).collect();
    let mut group = c.benchmark_group("mean_reliability");
    group.sample_size(10);
    group.bench_function("16_node_dart", |b| {
        b.iter(|| {
            mean_reliability(
                black_box(&dart),
                &grid,
                &FlowWeights::uniform(),
                &EnumConfig::default(),
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, cut_counts, single_p, network_mean);
criterion_main!(benches);
