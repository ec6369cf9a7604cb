use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fluctlab::cumulants::{moments_from_cumulants, CorrelatorTable, CumulantTable};
use fluctlab::exec::Parallelism;
use fluctlab::model::{product_ansatz_state, FactorProfile};
use fluctlab::scaling::{exponent_sweep, ScalingConfig, SlotData};
use fluctlab::window::{WindowKind, WindowProfile, DEFAULT_RESOLUTION};
use num_complex::Complex64;

const MODES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("parallel", Parallelism::Parallel)];

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("exponent_sweep");
    group.sample_size(10);
    for (n, l) in [(1, 3), (2, 2)] {
        let window = WindowProfile::shared(WindowKind::MollifiedStep, n, DEFAULT_RESOLUTION).unwrap();
        let g = |amp| FactorProfile::Gaussian { amp, width: 1.0 };
        let state = product_ansatz_state(n, &[(2, vec![g(1.0)]), (3, vec![g(0.5), g(0.5)])]).unwrap();
        for (name, mode) in MODES {
            let cfg = ScalingConfig { parallelism: mode, ..ScalingConfig::default() };
            group.bench_with_input(BenchmarkId::new(name, format!("n={n} l={l}")), &cfg, |b, cfg| {
                b.iter(|| exponent_sweep(&state, &window, cfg, l, n as f64 / 2.0, &SlotData::default()).unwrap())
            });
        }
    }
    group.finish();
}

fn cumulant_tables(c: &mut Criterion) {
    let mut table = CorrelatorTable::new(3, 6);
    for k in 1..=6 {
        for code in 0..3usize.pow(k as u32) {
            let seq = table.decode(k, code);
            let v = if k == 1 { 0.0 } else { ((code * 7 + k) as f64).sin() * 0.5 };
            table.set(&seq, Complex64::new(v, 0.1 * v));
        }
    }
    let ct = CumulantTable(table);
    let mut group = c.benchmark_group("moments_from_cumulants");
    for (name, mode) in MODES {
        group.bench_function(name, |b| b.iter(|| moments_from_cumulants(black_box(&ct), 6, mode).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, sweeps, cumulant_tables);
criterion_main!(benches);
