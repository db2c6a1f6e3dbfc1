use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use mye_bench::income_filled;
use mye_core::analysis::{apply_filter, compatibility, CompatOptions};
use mye_core::{
    design_filters, simulate_bias, verify_filter_set, ComparisonSpec, DesignSpec, LogBase,
    NoiseLevels, SimulationSpec, TrendPolynomial,
};

fn design(c: &mut Criterion) {
    let mut g = c.benchmark_group("design_filters");
    for d in 1..=8 {
        let spec = DesignSpec::new([1, 3, 5], d).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(d), &spec, |b, s| {
            b.iter(|| design_filters(black_box(s)).unwrap())
        });
    }
    g.finish();

    let fs = design_filters(&DesignSpec::new([1, 3, 5], 3).unwrap()).unwrap();
    c.bench_function("verify_filter_set/d3", |b| {
        b.iter(|| verify_filter_set(black_box(&fs)))
    });
}

fn filtering(c: &mut Criterion) {
    let series = income_filled();
    let fs = design_filters(&DesignSpec::new([1, 3, 5], 1).unwrap()).unwrap();
    let psi1 = fs.psi(1).unwrap().clone();
    c.bench_function("apply_filter/psi1", |b| {
        b.iter(|| apply_filter(black_box(&psi1), &series, 1, 2007).unwrap())
    });
    c.bench_function("compatibility/income", |b| {
        b.iter(|| compatibility(&series, &[3, 5], CompatOptions::new(LogBase::Ten, true)).unwrap())
    });
}

fn simulation(c: &mut Criterion) {
    let fs = design_filters(&DesignSpec::new([1, 3, 5], 1).unwrap()).unwrap();
    let spec = SimulationSpec {
        trend: TrendPolynomial::new(vec![10.0, 1.0]),
        noise_sd: NoiseLevels::uniform(1.0),
        comparison: ComparisonSpec::proper(100, 1, 5).unwrap(),
        replicates: 20_000,
        seed: 7,
    };
    let mut g = c.benchmark_group("simulate_bias");
    g.sample_size(20);
    g.bench_function("proper/20k", |b| {
        b.iter(|| simulate_bias(black_box(&spec), Some(&fs)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, design, filtering, simulation);
criterion_main!(benches);
