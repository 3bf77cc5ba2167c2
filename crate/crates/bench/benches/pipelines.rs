//! Benchmarks for the main computational pipelines: exact algebra
//! construction, symmetry/normalization, the moving-frame reduction, and
//! the bilinear-kernel recovery.

use criterion::{criterion_group, criterion_main, Criterion};
use flagframes_core::duality::find_compatible_bilinear;
use flagframes_core::frames::{ProjectiveContext, ProjectiveCurve};
use flagframes_core::g2::{build_g2, g2_case_setup, G2Case, G2Parabolic};
use flagframes_core::normalization::invariant_complement_certificate;
use flagframes_core::structure::{symmetry_algebra, SymmetryMode};
use std::hint::black_box;

fn rational_normal_curve(k: usize, n: usize) -> ProjectiveCurve {
    ProjectiveCurve::from_jet(k, -0.4, 0.005, n, move |t, order| {
        (0..=k as i64)
            .map(|p| {
                let o = order as i64;
                if o > p {
                    0.0
                } else {
                    let mut c = 1.0;
                    for m in 0..o {
                        c *= (p - m) as f64;
                    }
                    c * t.powi((p - o) as i32)
                }
            })
            .collect()
    })
}

fn bench_algebra(c: &mut Criterion) {
    c.bench_function("sl5_flag_construction", |b| {
        b.iter(|| {
            flagframes_core::algebra::GradedAlgebra::sl_flag(black_box(&[2, 2, 1])).unwrap()
        })
    });
    // the G2 build is cached; measure the certificate instead
    let (a, x) = g2_case_setup(G2Case::P2Orbit2);
    let sg = symmetry_algebra(&a, &a.element(x).unwrap(), SymmetryMode::Unparametrized).unwrap();
    c.bench_function("g2_invariant_complement_certificate", |b| {
        b.iter(|| invariant_complement_certificate(black_box(&sg)))
    });
    c.bench_function("g2_symmetry_algebra", |b| {
        let (a, x) = g2_case_setup(G2Case::BNondegenerate);
        let el = a.element(x).unwrap();
        b.iter(|| symmetry_algebra(black_box(&a), black_box(&el), SymmetryMode::Unparametrized))
    });
    let _ = build_g2(G2Parabolic::B);
}

fn bench_frames(c: &mut Criterion) {
    let ctx = ProjectiveContext::new(4, SymmetryMode::Unparametrized).unwrap();
    let curve = rational_normal_curve(4, 200);
    c.bench_function("invariants_pipeline_p4_200_nodes", |b| {
        b.iter(|| ctx.invariants(black_box(&curve)).unwrap())
    });
}

fn bench_duality(c: &mut Criterion) {
    let curve = rational_normal_curve(3, 128);
    c.bench_function("bilinear_kernel_recovery_p3", |b| {
        b.iter(|| find_compatible_bilinear(black_box(&curve)).unwrap())
    });
}

criterion_group!(benches, bench_algebra, bench_frames, bench_duality);
criterion_main!(benches);
