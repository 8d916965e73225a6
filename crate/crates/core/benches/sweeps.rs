//! Monte-Carlo sweeps under sequential and parallel execution.
//!
//! `cargo bench -p mixlab-core` runs both modes; build with
//! `--no-default-features` to see the parallel arm fall back to sequential.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use mixlab::bounds::{verify_bounds, Method, VerifyOptions};
use mixlab::chain::{CylinderFunction, TransitionKernel};
use mixlab::coupling::{block_disagreement_profile, clock_counts, BlockSchedule};
use mixlab::par::Execution;
use mixlab::potential::Potential;
use mixlab::seq::{Alphabet, Context};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn order3() -> (Potential, TransitionKernel) {
    let p0 = [0.7, 0.4, 0.55, 0.3, 0.65, 0.35, 0.5, 0.25];
    let probs: Vec<f64> = p0.iter().flat_map(|p| [*p, 1.0 - p]).collect();
    let rows: Vec<f64> = probs.iter().map(|p| p.ln()).collect();
    let psi = Potential::from_table(Alphabet::digits(2).unwrap(), 3, rows).unwrap();
    let kernel = TransitionKernel::from_potential(&psi).unwrap();
    (psi, kernel)
}

fn pasts(kernel: &TransitionKernel) -> (Context, Context) {
    let a = kernel.alphabet();
    (
        Context::parse(a, "000", "pad:0".parse().unwrap()).unwrap(),
        Context::parse(a, "111", "pad:1".parse().unwrap()).unwrap(),
    )
}

fn coupled_clock(c: &mut Criterion) {
    let (_, kernel) = order3();
    let (x, y) = pasts(&kernel);
    let mut group = c.benchmark_group("clock_counts");
    group.sample_size(10);
    for runs in [20_000usize, 100_000] {
        group.throughput(Throughput::Elements(runs as u64));
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, runs), &runs, |b, &runs| {
                b.iter(|| clock_counts(&kernel, &x, &y, 50, 10, runs, 1, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn block_profile(c: &mut Criterion) {
    let (_, kernel) = order3();
    let (x, y) = pasts(&kernel);
    let schedule = BlockSchedule::linear(3).unwrap();
    let mut group = c.benchmark_group("block_disagreement");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| block_disagreement_profile(&kernel, &x, &y, &schedule, 12, 20_000, 2, exec).unwrap())
        });
    }
    group.finish();
}

fn monte_carlo_verify(c: &mut Criterion) {
    let (psi, _) = order3();
    let f = CylinderFunction::indicator(2, &[0]).unwrap();
    let g = CylinderFunction::indicator(2, &[1, 0]).unwrap();
    let mut group = c.benchmark_group("verify_monte_carlo");
    group.sample_size(10);
    for (name, exec) in MODES {
        let opts = VerifyOptions { n_max: 40, method: Method::MonteCarlo { runs: 50_000 }, seed: 3, exec, ..Default::default() };
        group.bench_function(name, |b| b.iter(|| verify_bounds(&psi, &f, &g, &opts).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, coupled_clock, block_profile, monte_carlo_verify);
criterion_main!(benches);
