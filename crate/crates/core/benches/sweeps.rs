//! Parallel against sequential evaluation of a closed-loop eigenvalue sweep.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mtdc_core::analysis::{close_loop, CommMask};
use mtdc_core::grid::{perturb, CompositePlant, SystemParams, UncertaintySpec};
use mtdc_core::par;
use mtdc_core::sim::{build_case, Case, DesignOptions};

fn sweeps(c: &mut Criterion) {
    let plant = CompositePlant::build(&SystemParams::default()).unwrap();
    let ctrl = build_case(&plant, Case::Case2, &DesignOptions::default()).unwrap();
    let point = |&seed: &u64| {
        let p = perturb(&plant, &UncertaintySpec { level: 0.2, seed, ..Default::default() }).unwrap();
        close_loop(&p, &ctrl.controllers, None, &CommMask::none()).unwrap().spectrum().unwrap().max_real()
    };

    let mut g = c.benchmark_group("uncertainty_sweep");
    g.sample_size(10);
    for n in [8u64, 32] {
        let seeds: Vec<u64> = (0..n).collect();
        assert_eq!(par::map(&seeds, point), par::map_sequential(&seeds, point));
        g.bench_with_input(BenchmarkId::new("parallel", n), &seeds, |b, s| b.iter(|| par::map(s, point)));
        g.bench_with_input(BenchmarkId::new("sequential", n), &seeds, |b, s| b.iter(|| par::map_sequential(s, point)));
    }
    g.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
