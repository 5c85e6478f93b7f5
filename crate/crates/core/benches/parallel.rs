use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use signdeg::boolfn::parity;
use signdeg::exactlp::rational::{pow2_neg, ratio};
use signdeg::hardhs::{build_moment_matched, build_partition, sample_weights, verify_spectrum_bounds};
use signdeg::par::Execution;
use signdeg::rapprox::sign_grid_table;
use signdeg::signrep::{krause_pudlak, threshold_density};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn grid_table(c: &mut Criterion) {
    let mut g = c.benchmark_group("sign_grid_table");
    g.sample_size(10);
    let ns: Vec<usize> = (1..=6).collect();
    let tol = pow2_neg(12);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, "N<=6"), &exec, |b, &exec| {
            b.iter(|| sign_grid_table(&ns, 6, &tol, exec).unwrap())
        });
    }
    g.finish();
}

fn moment_matching(c: &mut Criterion) {
    let mut g = c.benchmark_group("moment_matching");
    g.sample_size(10);
    let p = build_partition(&sample_weights(12, 1, 1)).unwrap();
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, "n=12,k=1"), &exec, |b, &exec| {
            b.iter(|| build_moment_matched(&p, 1, exec).unwrap())
        });
    }
    g.finish();
}

fn spectrum(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectrum_bounds");
    g.sample_size(10);
    let p = build_partition(&sample_weights(14, 2, 3)).unwrap();
    let (eps, zeta) = (ratio(1, 4), ratio(1, 5));
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, "n=14,k=2"), &exec, |b, &exec| {
            b.iter(|| verify_spectrum_bounds(&p, &eps, &zeta, exec).unwrap())
        });
    }
    g.finish();
}

fn density(c: &mut Criterion) {
    let mut g = c.benchmark_group("threshold_density");
    g.sample_size(10);
    let kp = krause_pudlak(&parity(2)).unwrap();
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, "parity:2^KP,cap=2"), &exec, |b, &exec| {
            b.iter(|| threshold_density(&kp, "kp", 2, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, grid_table, moment_matching, spectrum, density);
criterion_main!(benches);
