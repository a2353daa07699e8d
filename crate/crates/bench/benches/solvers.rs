use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lambda0_bench::{chain, chord_cover, schottky_pair};
use lambda0_core::amenability::{amenability_verdict, folner_search, FolnerBudget, VerdictBudget};
use lambda0_core::hyperbolic::{critical_exponent_estimate, poincare_series, Point};
use lambda0_core::isoperimetry::{cheeger_constant, CutMode};
use lambda0_core::lazy::LazyGraph;
use lambda0_core::spectral::{lambda0_exhaustion, lambda0_finite};
use lambda0_core::Graph;
use num_complex::Complex64;

fn bottom_of_spectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("lambda0_finite");
    for blobs in [50, 100, 200] {
        let g = chain(blobs).unwrap();
        group.bench_with_input(BenchmarkId::new("blob_chain", g.len()), &g, |b, g| {
            b.iter(|| lambda0_finite(g, None).unwrap())
        });
    }
    group.finish();
}

fn exhaustion(c: &mut Criterion) {
    let mut group = c.benchmark_group("lambda0_exhaustion");
    group.sample_size(10);
    let plane = LazyGraph::lattice(2).unwrap();
    group.bench_function("lattice2_r20", |b| {
        b.iter(|| lambda0_exhaustion(&plane, &plane.root(), &[5, 10, 20], 100_000).unwrap())
    });
    let cover = chord_cover().unwrap();
    let root = cover.base_point(0);
    group.bench_function("chord_cover_r8", |b| {
        b.iter(|| lambda0_exhaustion(&cover, &root, &[4, 8], 100_000).unwrap())
    });
    group.finish();
}

fn cheeger(c: &mut Criterion) {
    let g = Graph::cycle(18).unwrap();
    c.bench_function("cheeger_exact_c18", |b| b.iter(|| cheeger_constant(&g, None, CutMode::Exact).unwrap()));
}

fn folner(c: &mut Criterion) {
    let mut group = c.benchmark_group("folner");
    group.sample_size(10);
    let cover = chord_cover().unwrap();
    let words = vec![cover.action().parse_word("a").unwrap(), cover.action().parse_word("b").unwrap()];
    group.bench_function("search_free2", |b| {
        b.iter(|| folner_search(cover.action(), &words, 0.2, FolnerBudget::default()).unwrap())
    });
    group.bench_function("verdict_free2", |b| {
        b.iter(|| amenability_verdict(cover.action(), &words, 0.2, VerdictBudget::default()).unwrap())
    });
    group.finish();
}

fn poincare(c: &mut Criterion) {
    let mut group = c.benchmark_group("poincare");
    group.sample_size(10);
    let gens = schottky_pair().unwrap();
    let x = Point::halfplane(Complex64::new(0.3, 1.7)).unwrap();
    group.bench_function("series_len7", |b| b.iter(|| poincare_series(&gens, 1.0, &x, &x, 7).unwrap()));
    group.bench_function("delta_len7", |b| {
        b.iter(|| critical_exponent_estimate(&gens, &x, (0.1, 1.0), 0.05, 7).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bottom_of_spectrum, exhaustion, cheeger, folner, poincare);
criterion_main!(benches);
