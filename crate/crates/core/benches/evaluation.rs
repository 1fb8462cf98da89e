use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use funcest::elliptic::rd_equality;
use funcest::exec::with_serial;
use funcest::manufactured::{catalog, perturb, Level, ProblemKind};
use funcest::optimizer::{gradient_flux_basis, minimize_flux_majorant, MajorantWeights};
use funcest::parabolic::trd_equality;
use funcest::QuadratureRule;

fn modes() -> [(&'static str, bool); 2] {
    [("parallel", false), ("serial", true)]
}

fn run<R>(serial: bool, f: impl FnOnce() -> R) -> R {
    if serial {
        with_serial(f)
    } else {
        f()
    }
}

fn equalities(c: &mut Criterion) {
    let q = QuadratureRule::default();
    let rd = catalog(ProblemKind::ReactionDiffusion).remove(7);
    let rd_pair = perturb(&rd, Level::ConformingMixed, 0.1, 1).unwrap();
    let trd = catalog(ProblemKind::TimeReactionDiffusion).remove(7);
    let trd_pair = perturb(&trd, Level::ConformingMixed, 0.1, 1).unwrap();

    let mut group = c.benchmark_group("equality");
    for (name, serial) in modes() {
        group.bench_with_input(BenchmarkId::new("rd_2d", name), &serial, |b, &s| {
            b.iter(|| run(s, || black_box(rd_equality(&rd, &rd_pair, &q).unwrap())))
        });
        group.bench_with_input(BenchmarkId::new("trd_2d", name), &serial, |b, &s| {
            b.iter(|| run(s, || black_box(trd_equality(&trd, &trd_pair, &q).unwrap())))
        });
    }
    group.finish();
}

fn flux_fit(c: &mut Criterion) {
    let q = QuadratureRule::default();
    let case = catalog(ProblemKind::ReactionDiffusion).remove(7);
    let ut = case.exact_u.scale(0.9);
    let basis = gradient_flux_basis(&case.dom, 16).unwrap();
    let mut group = c.benchmark_group("flux_fit");
    for (name, serial) in modes() {
        group.bench_with_input(BenchmarkId::new("basis16", name), &serial, |b, &s| {
            b.iter(|| {
                run(s, || {
                    black_box(
                        minimize_flux_majorant(
                            &case,
                            &ut,
                            &basis,
                            MajorantWeights::reaction_diffusion(),
                            &q,
                        )
                        .unwrap(),
                    )
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, equalities, flux_fit);
criterion_main!(benches);
