//! Closed-form and independently computed reference values for the estimators.

use std::f64::consts::PI;

use funcest::analytic::{Factor, SeparableSum};
use funcest::elliptic::{
    friedrichs_constant, poisson_nonconforming, poisson_two_sided, rd_equality,
    rd_nonconforming_bounds, rd_semiconforming_bounds, rd_very_conforming_equality, NcPart,
    PoissonNcPart, SemiPart,
};
use funcest::field::{ScalarField, VectorField};
use funcest::manufactured::{catalog, free_fields, make_case, perturb, FreeStrategy, Level};
use funcest::optimizer::{
    gradient_flux_basis, minimize_flux_majorant, optimal_gamma, young_bound, MajorantWeights,
};
use funcest::parabolic::{
    heat_two_sided, trd_isometry_check, trd_very_conforming_equality,
};
use funcest::{ApproxPair, BoxDomain, ProblemCase, ProblemKind, QuadratureRule};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

/// Smallest eigenvalue of the 1D Dirichlet finite-difference Laplacian on `(0, len)` by
/// inverse iteration with a tridiagonal solve.
fn fd_eigenvalue_1d(len: f64, n: usize) -> f64 {
    let h = len / (n + 1) as f64;
    let (diag, off) = (2.0 / (h * h), -1.0 / (h * h));
    let mut v = vec![1.0; n];
    let mut lambda = 0.0;
    for _ in 0..200 {
        // Thomas algorithm for the constant tridiagonal system.
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        c[0] = off / diag;
        d[0] = v[0] / diag;
        for i in 1..n {
            let m = diag - off * c[i - 1];
            c[i] = off / m;
            d[i] = (v[i] - off * d[i - 1]) / m;
        }
        let mut w = vec![0.0; n];
        w[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            w[i] = d[i] - c[i] * w[i + 1];
        }
        let dot_vw: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let dot_ww: f64 = w.iter().map(|a| a * a).sum();
        lambda = dot_vw / dot_ww;
        let norm = dot_ww.sqrt();
        v = w.into_iter().map(|x| x / norm).collect();
    }
    lambda
}

fn apply_2d(u: &[f64], n: usize, h: f64) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    let at = |i: isize, j: isize| -> f64 {
        if i < 0 || j < 0 || i >= n as isize || j >= n as isize {
            0.0
        } else {
            u[i as usize * n + j as usize]
        }
    };
    for i in 0..n as isize {
        for j in 0..n as isize {
            out[i as usize * n + j as usize] = (4.0 * at(i, j)
                - at(i - 1, j)
                - at(i + 1, j)
                - at(i, j - 1)
                - at(i, j + 1))
                / (h * h);
        }
    }
    out
}

fn cg(b: &[f64], n: usize, h: f64) -> Vec<f64> {
    let mut x = vec![0.0; b.len()];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr: f64 = r.iter().map(|a| a * a).sum();
    let tol = 1e-24 * rr.max(1e-300);
    for _ in 0..10 * b.len() {
        let ap = apply_2d(&p, n, h);
        let alpha = rr / p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
        for i in 0..x.len() {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new: f64 = r.iter().map(|a| a * a).sum();
        if rr_new < tol {
            break;
        }
        let beta = rr_new / rr;
        for i in 0..p.len() {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
    }
    x
}

/// Smallest eigenvalue of the 5-point Dirichlet Laplacian on the unit square, inverse
/// iteration with conjugate gradients.
fn fd_eigenvalue_unit_square(n: usize) -> f64 {
    let h = 1.0 / (n + 1) as f64;
    let mut v = vec![1.0; n * n];
    let mut lambda = 0.0;
    for _ in 0..30 {
        let w = cg(&v, n, h);
        let dot_vw: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let dot_ww: f64 = w.iter().map(|a| a * a).sum();
        lambda = dot_vw / dot_ww;
        let norm = dot_ww.sqrt();
        v = w.into_iter().map(|x| x / norm).collect();
    }
    lambda
}

#[test]
fn friedrichs_constant_matches_finite_difference_eigenvalues() {
    let unit = friedrichs_constant(&BoxDomain::unit(1).unwrap()).value;
    let oracle = 1.0 / fd_eigenvalue_1d(1.0, 400).sqrt();
    assert!((unit - oracle).abs() < 1e-3, "{unit} vs {oracle}");

    let long = friedrichs_constant(&BoxDomain::new(vec![0.0], vec![2.0]).unwrap()).value;
    let oracle = 1.0 / fd_eigenvalue_1d(2.0, 400).sqrt();
    assert!((long - oracle).abs() < 1e-3, "{long} vs {oracle}");
    assert!(close(long, 2.0 / PI, 1e-15));

    let square = friedrichs_constant(&BoxDomain::unit(2).unwrap()).value;
    let oracle = 1.0 / fd_eigenvalue_unit_square(40).sqrt();
    assert!((square - oracle).abs() < 1e-3, "{square} vs {oracle}");
}

fn sine_case(kind: ProblemKind) -> ProblemCase {
    let dom = BoxDomain::unit(1).unwrap();
    let u = SeparableSum::sine_product(&dom, &[1.0], 1.0, Factor::one());
    make_case("sin", kind, &dom, &u).unwrap()
}

#[test]
fn rd_equality_random_perturbation() {
    let q = QuadratureRule::default();
    for case in catalog(ProblemKind::ReactionDiffusion) {
        let a = perturb(&case, Level::ConformingMixed, 0.1, 7).unwrap();
        let r = rd_equality(&case, &a, &q).unwrap();
        assert!(r.rel_residual <= 1e-8, "{}: {}", case.name, r.rel_residual);
        assert!(r.worst_residual() <= 1e-8);
    }
}

#[test]
fn rd_very_conforming_with_other_mode() {
    let case = sine_case(ProblemKind::ReactionDiffusion);
    let q = QuadratureRule::default();
    let ut = SeparableSum::sine_product(&case.dom, &[2.0], 1.0, Factor::one())
        .to_field("u~", &case.dom)
        .unwrap();
    let r = rd_very_conforming_equality(&case, &ut, &q).unwrap();
    assert!(r.rel_residual <= 1e-8);
    // error = sin(πx) - sin(2πx): orthogonal modes, so the V-norm splits.
    let mode = |k: f64| (1.0 + k * k * PI * PI).powi(2) / 2.0;
    assert!(close(r.lhs_total, mode(1.0) + mode(2.0), 1e-10));
}

#[test]
fn rd_nonconforming_sharp_with_exact_free_fields() {
    let q = QuadratureRule::default();
    for case in catalog(ProblemKind::ReactionDiffusion).iter().take(5) {
        let a = perturb(case, Level::NonConforming, 0.3, 3).unwrap();
        let (phi, flux) = free_fields(case, FreeStrategy::Exact).unwrap();
        for gamma in [1e-6, 0.1, 1.0, 7.0] {
            let r = rd_nonconforming_bounds(case, &a, &phi, &flux, gamma, NcPart::Iii, &q).unwrap();
            assert!(close(r.upper, (1.0 + gamma) * r.true_total, 1e-10));
        }
    }
}

#[test]
fn rd_semiconforming_bracket_on_seeds() {
    let q = QuadratureRule::default();
    let case = &catalog(ProblemKind::ReactionDiffusion)[6];
    for seed in 0..100 {
        let (part, level) = if seed % 2 == 0 {
            (SemiPart::I, Level::SemiConformingPrimal)
        } else {
            (SemiPart::Ii, Level::SemiConformingDual)
        };
        let eps = [0.01, 0.1, 1.0][seed as usize % 3];
        let a = perturb(case, level, eps, seed).unwrap();
        let (phi, flux) = free_fields(case, FreeStrategy::Coarse).unwrap();
        let r = rd_semiconforming_bounds(case, &a, &phi, &flux, 0.5 + seed as f64 * 0.01, part, &q)
            .unwrap();
        assert!(r.ordering_holds(1e-9), "seed {seed}: {r:?}");
        assert!(r.upper <= r.extra[0].value * (1.0 + 1e-14));
    }
}

#[test]
fn poisson_two_sided_orders_and_cross_checks() {
    let q = QuadratureRule::default();
    for (i, case) in catalog(ProblemKind::Poisson).iter().enumerate() {
        let cf = friedrichs_constant(&case.dom).value;
        for seed in 0..10u64 {
            let eps = [0.01, 0.1, 1.0][seed as usize % 3];
            let a = perturb(case, Level::ConformingMixed, eps, seed * 31 + i as u64).unwrap();
            let r = poisson_two_sided(case, &a, cf, None, &q).unwrap();
            assert!(r.ordering_holds(1e-9), "{}: {r:?}", case.name);
            assert!(r.worst_check() < 1e-10);
        }
    }
}

#[test]
fn poisson_nc_exact_free_fields() {
    let q = QuadratureRule::default();
    let case = &catalog(ProblemKind::Poisson)[7];
    let cf = friedrichs_constant(&case.dom).value;
    let a = perturb(case, Level::NonConforming, 0.5, 9).unwrap();
    let (phi, flux) = free_fields(case, FreeStrategy::Exact).unwrap();
    let i = poisson_nonconforming(case, &a, &phi, &flux, cf, PoissonNcPart::I, &q).unwrap();
    assert!(close(i.upper, i.true_total, 1e-10));
    // Part (ii) gives |p-p~|² + |p~-p|², twice the error.
    let ii = poisson_nonconforming(case, &a, &phi, &flux, cf, PoissonNcPart::Ii, &q).unwrap();
    assert!(close(ii.upper, 2.0 * ii.true_total, 1e-10));
}

#[test]
fn poisson_mixed_ii_with_own_flux() {
    let q = QuadratureRule::default();
    for (k, case) in catalog(ProblemKind::Poisson).iter().enumerate() {
        let cf = friedrichs_constant(&case.dom).value;
        for seed in 0..5u64 {
            let a = perturb(case, Level::SemiConformingDual, 0.2, seed + 100 * k as u64).unwrap();
            let (phi, _) = free_fields(case, FreeStrategy::Coarse).unwrap();
            let r = poisson_nonconforming(case, &a, &phi, &a.p_tilde, cf, PoissonNcPart::MixedIi, &q)
                .unwrap();
            assert!(r.true_total <= r.upper + 1e-9, "{}: {r:?}", case.name);
        }
    }
}

#[test]
fn trd_isometry_linear_in_time() {
    let dom = BoxDomain::unit(1).unwrap().with_time_horizon(1.0).unwrap();
    let u = SeparableSum::sine_product(&dom, &[1.0], 1.0, Factor::Poly { coeffs: vec![0.0, 1.0] });
    let case = make_case("t-sin", ProblemKind::TimeReactionDiffusion, &dom, &u).unwrap();
    let p = funcest::Point::new(0.3, &[0.4]);
    let expect_f = (1.0 + 0.3 + 0.3 * PI * PI) * (PI * 0.4).sin();
    assert!((case.f.eval(&p) - expect_f).abs() < 1e-12);
    let r = trd_isometry_check(&case, &QuadratureRule::default()).unwrap();
    assert!(r.rel_residual <= 1e-8);
    // ‖f‖² = ∫(1 + t(1+π²))² dt / 2
    let a = 1.0 + PI * PI;
    let f2 = (1.0 + a + a * a / 3.0) / 2.0;
    assert!(close(r.rhs_total, f2, 1e-12));
}

#[test]
fn trd_very_conforming_against_foreign_approximation() {
    let dom = BoxDomain::unit(1).unwrap().with_time_horizon(1.0).unwrap();
    let u = SeparableSum::sine_product(&dom, &[1.0], 1.0, Factor::Exp { rate: -1.0 });
    let case = make_case("e", ProblemKind::TimeReactionDiffusion, &dom, &u).unwrap();
    let ut = SeparableSum::sine_product(&dom, &[2.0], 1.0, Factor::Poly { coeffs: vec![0.0, 1.0] })
        .to_field("u~", &dom)
        .unwrap();
    let q = QuadratureRule::default();
    let r = trd_very_conforming_equality(&case, &ut, &q).unwrap();
    assert!(r.rel_residual <= 1e-8);
    let half = trd_very_conforming_equality(&case, &case.exact_u.scale(0.5), &q).unwrap();
    let zero = trd_very_conforming_equality(&case, &ScalarField::zero(), &q).unwrap();
    assert!(close(half.rhs_total, 0.25 * zero.rhs_total, 1e-12));
}

#[test]
fn heat_two_sided_closed_form() {
    let dom = BoxDomain::unit(1).unwrap().with_time_horizon(1.0).unwrap();
    let u = SeparableSum::sine_product(&dom, &[1.0], 1.0, Factor::Exp { rate: -1.0 });
    let case = make_case("e", ProblemKind::Heat, &dom, &u).unwrap();
    let a = ApproxPair {
        u_tilde: ScalarField::zero(),
        p_tilde: VectorField::zero(),
        level: Level::ConformingMixed,
    };
    let c = 1.0 / PI;
    let r = heat_two_sided(&case, &a, c, None, &QuadratureRule::default()).unwrap();
    let pi2 = PI * PI;
    let decay = 1.0 - (-2f64).exp();
    let res = (pi2 - 1.0).powi(2) * decay / 4.0;
    // p~ = grad u~ = 0, so only the residual and the initial mismatch survive.
    let grad = pi2 * decay / 4.0;
    let init = 0.5;
    let lower = res.max(init / (1.0 + c * c));
    let truth = 2.0 * grad + res + (-2f64).exp() / 2.0;
    let upper = (1.0 + 4.0 * c * c) * res + 2.0 * init;
    assert!(close(r.lower, lower, 1e-12));
    assert!(close(r.true_total, truth, 1e-12));
    assert!(close(r.upper, upper, 1e-12));
    assert!(lower <= truth && truth <= upper);
}

#[test]
fn heat_two_sided_random_cases() {
    let q = QuadratureRule::default();
    let cases = catalog(ProblemKind::Heat);
    for k in 0..100u64 {
        let case = &cases[k as usize % cases.len()];
        let cf = friedrichs_constant(&case.dom).value;
        let eps = [0.01, 0.1, 1.0][k as usize % 3];
        let a = perturb(case, Level::ConformingMixed, eps, k).unwrap();
        let r = heat_two_sided(case, &a, cf, None, &q).unwrap();
        assert!(r.ordering_holds(1e-9), "{}: {r:?}", case.name);
        assert!(r.worst_check() < 1e-10);
        let g = heat_two_sided(case, &a, cf, Some(1.3 + k as f64 * 0.05), &q).unwrap();
        assert!(g.ordering_holds(1e-9));
    }
}

#[test]
fn optimal_gamma_against_grid_search() {
    let (a, b) = (2.0, 3.0);
    let best = (0..1000)
        .map(|i| 10f64.powf(-4.0 + 8.0 * i as f64 / 999.0))
        .map(|g| young_bound(a, b, g))
        .fold(f64::INFINITY, f64::min);
    let c = optimal_gamma(a, b).unwrap();
    assert!(c.bound <= best);
    assert!(close(c.bound, best, 1e-4));
    assert!(close(young_bound(a, b, c.gamma), c.bound, 1e-14));
}

#[test]
fn flux_fit_matches_coefficient_grid_search() {
    let case = sine_case(ProblemKind::ReactionDiffusion);
    let q = QuadratureRule::default();
    let ut = case.exact_u.scale(0.9);
    let basis = gradient_flux_basis(&case.dom, 4).unwrap();
    let w = MajorantWeights::reaction_diffusion();
    let fit = minimize_flux_majorant(&case, &ut, &basis, w, &q).unwrap();
    let eval = |c: &[f64]| {
        let flux = VectorField::linear_combination(c, &basis);
        let r = funcest::norms::l2_norm_sq(
            (&case.f.sub(&ut).add(&flux.div_field().unwrap())).into(),
            &case.dom,
            &q,
        )
        .unwrap();
        let g = funcest::norms::l2_norm_sq(
            (&flux.sub(&ut.gradient_field().unwrap())).into(),
            &case.dom,
            &q,
        )
        .unwrap();
        r + g
    };
    let h = 1e-3;
    for axis in 0..4 {
        for step in [-2.0, -1.0, 1.0, 2.0] {
            let mut c = fit.coefficients.clone();
            c[axis] += step * h;
            assert!(eval(&c) >= fit.value * (1.0 - 1e-12), "axis {axis} step {step}");
        }
    }
    assert!(close(eval(&fit.coefficients), fit.value, 1e-12));
}
