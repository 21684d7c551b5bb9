//! Data-parallel vs sequential throughput for the two hot loops: Galerkin
//! matrix assembly and the sampling-grid scan.
//!
//! With the default `parallel` feature the rayon path is benchmarked against
//! the always-available `*_serial` fallback; without it only the sequential
//! path exists and is reported alone.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use prolate_lsm::forward::{assemble_data_matrix_serial, ContrastProfile};
use prolate_lsm::inverse::{scan_serial, Reference, RegularizationFilter, ScanContext};
use prolate_lsm::pswf::{default_basis_size, solve_pswf};
use prolate_lsm::quadrature::lgl_rule;

fn bench_assembly(c: &mut Criterion) {
    let bandwidth = 40.0;
    let n = default_basis_size(bandwidth);
    let basis = solve_pswf(bandwidth, n, 2 * n + 30).unwrap();
    let rule = lgl_rule(100).unwrap();
    let profile = ContrastProfile::constant(0.66).unwrap();
    let dim = 54;

    let mut group = c.benchmark_group("assemble_data_matrix");
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        b.iter(|| {
            prolate_lsm::forward::assemble_data_matrix(
                black_box(&profile),
                black_box(&basis),
                dim,
                &rule,
            )
            .unwrap()
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            assemble_data_matrix_serial(black_box(&profile), black_box(&basis), dim, &rule)
                .unwrap()
        })
    });
    group.finish();
}

fn bench_scan(c: &mut Criterion) {
    let bandwidth = 40.0;
    let n = default_basis_size(bandwidth);
    let basis = solve_pswf(bandwidth, n, 2 * n + 30).unwrap();
    let rule = lgl_rule(100).unwrap();
    let profile = ContrastProfile::constant(0.66).unwrap();
    let dim = 54;
    let matrix =
        prolate_lsm::forward::assemble_data_matrix(&profile, &basis, dim, &rule).unwrap();
    let ctx = ScanContext {
        basis: &basis,
        rule: &rule,
        matrix: &matrix,
        background: None,
        filter: RegularizationFilter::spectral_cutoff(1e-26).unwrap(),
        fm_terms: dim,
        reference: Reference::Plain(&profile),
    };
    let zs: Vec<f64> = (0..181).map(|i| -0.9 + 0.01 * i as f64).collect();

    let mut group = c.benchmark_group("scan_181_points");
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        b.iter(|| prolate_lsm::inverse::scan(black_box(&ctx), black_box(&zs), 0.05).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| scan_serial(black_box(&ctx), black_box(&zs), 0.05).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_assembly, bench_scan);
criterion_main!(benches);
