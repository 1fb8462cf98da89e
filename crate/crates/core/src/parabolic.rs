//! Identities, error equalities and two-sided estimates on the space-time cylinder for
//! `∂ₜu - Δu + u = f` and `∂ₜu - Δu = f` with initial value `u₀`.

use crate::domain::BoxDomain;
use crate::elliptic::{
    mixed_upper_coefficients, require_div, require_error_vanishes, require_primal, sq, sqv,
    DEFAULT_MIXED_GAMMA,
};
use crate::error::{Error, Result};
use crate::field::{FieldRef, ScalarField};
use crate::manufactured::{ApproxPair, ProblemCase, ProblemKind};
use crate::norms::{norm_components, trace_norm_sq, Component, NormKind, TimeLevel, TraceVariant};
use crate::quadrature::QuadratureRule;
use crate::report::{BoundReport, Check, EqualityReport};

fn trace(w: &ScalarField, at: TimeLevel, v: TraceVariant, dom: &BoxDomain, q: &QuadratureRule) -> Result<f64> {
    trace_norm_sq(FieldRef::Scalar(w), at, v, dom, q)
}

fn require_parabolic_primal(u: &ScalarField, dom: &BoxDomain) -> Result<()> {
    require_primal(u, dom)?;
    u.dt_fn().map(|_| ())
}

/// `‖u‖²_{H¹¹} + ‖∇u‖²_{H(div)} + ‖u(T)‖²_{H¹} = ‖f‖² + ‖u₀‖²_{H¹}` for the exact solution.
pub fn trd_isometry_check(case: &ProblemCase, q: &QuadratureRule) -> Result<EqualityReport> {
    case.require_kind(ProblemKind::TimeReactionDiffusion)?;
    let dom = &case.dom;
    let u0 = case.initial_value()?;
    let lhs = norm_components(NormKind::WStar, (&case.exact_u).into(), dom, q)?;
    let rhs = vec![
        Component::new("|f|^2", sq(&case.f, dom, q)?),
        Component::new("|u0|^2", trace(u0, TimeLevel::Initial, TraceVariant::Value, dom, q)?),
        Component::new(
            "|grad u0|^2",
            trace(u0, TimeLevel::Initial, TraceVariant::Gradient, dom, q)?,
        ),
    ];
    Ok(EqualityReport::new("trd_isometry", lhs, rhs))
}

/// `‖∂ₜu‖² + ‖Δu‖² + ‖∇u(T)‖² = ‖f‖² + ‖∇u₀‖²` for the exact solution.
pub fn heat_isometry_check(case: &ProblemCase, q: &QuadratureRule) -> Result<EqualityReport> {
    case.require_kind(ProblemKind::Heat)?;
    let dom = &case.dom;
    let u0 = case.initial_value()?;
    let lhs = norm_components(NormKind::Triple, (&case.exact_u).into(), dom, q)?;
    let rhs = vec![
        Component::new("|f|^2", sq(&case.f, dom, q)?),
        Component::new(
            "|grad u0|^2",
            trace(u0, TimeLevel::Initial, TraceVariant::Gradient, dom, q)?,
        ),
    ];
    Ok(EqualityReport::new("heat_isometry", lhs, rhs))
}

/// Expansion of `‖(∂ₜ - Δ + ω)w‖²` for a boundary-vanishing space-time field.
///
/// Terms are moved to whichever side gives them a non-negative coefficient, so the left
/// side holds `‖(∂ₜ-Δ+ω)w‖² + ‖∇w(0)‖²` (plus `ω‖w(0)‖²` for `ω ≥ 0`). With `ω = 1` the
/// totals coincide with the time-dependent reaction-diffusion isometry, with `ω = 0` with
/// the heat isometry.
pub fn omega_identity_check(
    w: &ScalarField,
    omega: f64,
    dom: &BoxDomain,
    q: &QuadratureRule,
) -> Result<EqualityReport> {
    if !omega.is_finite() {
        return Err(Error::InvalidParameter(format!("omega must be finite, got {omega}")));
    }
    dom.require_time_horizon()?;
    require_parabolic_primal(w, dom)?;
    let dt = w.dt_field()?;
    let lap = w.laplacian_field()?;
    let op = dt.sub(&lap).add(&w.scale(omega));
    let mut lhs = vec![Component::new("|(dt-lap+w)w|^2", sq(&op, dom, q)?)];
    let mut rhs = vec![
        Component::new("|dt w|^2", sq(&dt, dom, q)?),
        Component::new("w^2|w|^2", omega * omega * sq(w, dom, q)?),
    ];
    let grad = sqv(&w.gradient_field()?, dom, q)?;
    let grad_term = Component::new("2w|grad w|^2", 2.0 * omega.abs() * grad);
    rhs.push(Component::new("|lap w|^2", sq(&lap, dom, q)?));
    rhs.push(Component::new(
        "|grad w(T)|^2",
        trace(w, TimeLevel::Terminal, TraceVariant::Gradient, dom, q)?,
    ));
    lhs.push(Component::new(
        "|grad w(0)|^2",
        trace(w, TimeLevel::Initial, TraceVariant::Gradient, dom, q)?,
    ));
    let end = omega.abs() * trace(w, TimeLevel::Terminal, TraceVariant::Value, dom, q)?;
    let start = omega.abs() * trace(w, TimeLevel::Initial, TraceVariant::Value, dom, q)?;
    let end = Component::new("w|w(T)|^2", end);
    let start = Component::new("w|w(0)|^2", start);
    if omega >= 0.0 {
        rhs.insert(2, grad_term);
        rhs.push(end);
        lhs.push(start);
    } else {
        lhs.push(grad_term);
        lhs.push(end);
        rhs.push(start);
    }
    Ok(EqualityReport::new("omega_identity", lhs, rhs))
}

/// Conforming mixed equality for the time-dependent reaction-diffusion problem.
///
/// The middle term `‖∂ₜ(u-ũ) + div(p̃-p)‖²` is computed from the exact pair; the check
/// re-evaluates it as `‖f - u - ∂ₜũ + div p̃‖²`.
pub fn trd_equality(case: &ProblemCase, a: &ApproxPair, q: &QuadratureRule) -> Result<EqualityReport> {
    case.require_kind(ProblemKind::TimeReactionDiffusion)?;
    let dom = &case.dom;
    let u0 = case.initial_value()?;
    let (ut, pt) = (&a.u_tilde, &a.p_tilde);
    require_parabolic_primal(ut, dom)?;
    require_div(pt)?;
    let e = case.exact_u.sub(ut);
    require_error_vanishes(&e, dom)?;
    let ep = case.exact_p.sub(pt);
    let div_pt = pt.div_field()?;
    let middle = e.dt_field()?.sub(&ep.div_field()?);
    let middle_sq = sq(&middle, dom, q)?;
    let lhs = vec![
        Component::new("|u-u~|^2", sq(&e, dom, q)?),
        Component::new("|grad(u-u~)|^2", sqv(&e.gradient_field()?, dom, q)?),
        Component::new("|p-p~|^2", sqv(&ep, dom, q)?),
        Component::new("|dt(u-u~)+div(p~-p)|^2", middle_sq),
        Component::new(
            "|(u-u~)(T)|^2",
            trace(&e, TimeLevel::Terminal, TraceVariant::Value, dom, q)?,
        ),
    ];
    let dt_ut = ut.dt_field()?;
    let residual = case.f.sub(&dt_ut).sub(ut).add(&div_pt);
    let init = u0.sub(&ut.at_time(0.0));
    let rhs = vec![
        Component::new("|f-dt u~-u~+div p~|^2", sq(&residual, dom, q)?),
        Component::new("|p~-grad u~|^2", sqv(&pt.sub(&ut.gradient_field()?), dom, q)?),
        Component::new(
            "|u0-u~(0)|^2",
            trace(&init, TimeLevel::Initial, TraceVariant::Value, dom, q)?,
        ),
    ];
    let data_middle = case.f.sub(&case.exact_u).sub(&dt_ut).add(&div_pt);
    Ok(EqualityReport::new("trd_equality", lhs, rhs).with_check(Check::new(
        "middle term from data",
        middle_sq,
        sq(&data_middle, dom, q)?,
    )))
}

/// Very conforming equality for the time-dependent reaction-diffusion problem.
pub fn trd_very_conforming_equality(
    case: &ProblemCase,
    u_tilde: &ScalarField,
    q: &QuadratureRule,
) -> Result<EqualityReport> {
    case.require_kind(ProblemKind::TimeReactionDiffusion)?;
    let dom = &case.dom;
    let u0 = case.initial_value()?;
    require_parabolic_primal(u_tilde, dom)?;
    let lap = u_tilde.laplacian_field()?;
    let e = case.exact_u.sub(u_tilde);
    require_error_vanishes(&e, dom)?;
    let lhs = norm_components(NormKind::WStar, (&e).into(), dom, q)?;
    let residual = case.f.sub(&u_tilde.dt_field()?).sub(u_tilde).add(&lap);
    let init = u0.sub(&u_tilde.at_time(0.0));
    let rhs = vec![
        Component::new("|f-dt u~-u~+lap u~|^2", sq(&residual, dom, q)?),
        Component::new(
            "|u0-u~(0)|^2",
            trace(&init, TimeLevel::Initial, TraceVariant::Value, dom, q)?,
        ),
        Component::new(
            "|grad(u0-u~(0))|^2",
            trace(&init, TimeLevel::Initial, TraceVariant::Gradient, dom, q)?,
        ),
    ];
    Ok(EqualityReport::new("trd_very_conforming_equality", lhs, rhs))
}

/// Very conforming equality for the heat equation; the Friedrichs constant does not enter.
pub fn heat_very_conforming_equality(
    case: &ProblemCase,
    u_tilde: &ScalarField,
    q: &QuadratureRule,
) -> Result<EqualityReport> {
    case.require_kind(ProblemKind::Heat)?;
    let dom = &case.dom;
    let u0 = case.initial_value()?;
    require_parabolic_primal(u_tilde, dom)?;
    let lap = u_tilde.laplacian_field()?;
    let e = case.exact_u.sub(u_tilde);
    require_error_vanishes(&e, dom)?;
    let lhs = norm_components(NormKind::Triple, (&e).into(), dom, q)?;
    let residual = case.f.add(&lap).sub(&u_tilde.dt_field()?);
    let init = u0.sub(&u_tilde.at_time(0.0));
    let rhs = vec![
        Component::new("|f+lap u~-dt u~|^2", sq(&residual, dom, q)?),
        Component::new(
            "|grad(u0-u~(0))|^2",
            trace(&init, TimeLevel::Initial, TraceVariant::Gradient, dom, q)?,
        ),
    ];
    Ok(EqualityReport::new("heat_very_conforming_equality", lhs, rhs))
}

/// Two-sided estimate for conforming mixed heat approximations. `gamma = None` uses 2,
/// which gives the factors `1 + 4c²` and `2`.
pub fn heat_two_sided(
    case: &ProblemCase,
    a: &ApproxPair,
    cf: f64,
    gamma: Option<f64>,
    q: &QuadratureRule,
) -> Result<BoundReport> {
    case.require_kind(ProblemKind::Heat)?;
    let g = gamma.unwrap_or(DEFAULT_MIXED_GAMMA);
    let (c_res, c_gap) = mixed_upper_coefficients(cf, g)?;
    let dom = &case.dom;
    let u0 = case.initial_value()?;
    let (ut, pt) = (&a.u_tilde, &a.p_tilde);
    require_parabolic_primal(ut, dom)?;
    require_div(pt)?;
    let e = case.exact_u.sub(ut);
    require_error_vanishes(&e, dom)?;
    let ep = case.exact_p.sub(pt);
    let residual = case.f.add(&pt.div_field()?).sub(&ut.dt_field()?);
    let res = sq(&residual, dom, q)?;
    let gap = sqv(&pt.sub(&ut.gradient_field()?), dom, q)?;
    let init = trace(
        &u0.sub(&ut.at_time(0.0)),
        TimeLevel::Initial,
        TraceVariant::Value,
        dom,
        q,
    )?;
    let middle = sq(&e.dt_field()?.sub(&ep.div_field()?), dom, q)?;
    let truth = vec![
        Component::new("|grad(u-u~)|^2", sqv(&e.gradient_field()?, dom, q)?),
        Component::new("|p-p~|^2", sqv(&ep, dom, q)?),
        Component::new("|dt(u-u~)+div(p~-p)|^2", middle),
        Component::new(
            "|(u-u~)(T)|^2",
            trace(&e, TimeLevel::Terminal, TraceVariant::Value, dom, q)?,
        ),
    ];
    let lower = vec![
        Component::new("|f+div p~-dt u~|^2+|p~-grad u~|^2/2", res + 0.5 * gap),
        Component::new("(|p~-grad u~|^2+|u0-u~(0)|^2)/(1+c^2)", (gap + init) / (1.0 + cf * cf)),
    ];
    let upper = vec![
        Component::new("c_res|f+div p~-dt u~|^2", c_res * res),
        Component::new("c_gap|p~-grad u~|^2", c_gap * gap),
        Component::new("c_gap|u0-u~(0)|^2", c_gap * init),
    ];
    Ok(BoundReport::new("heat_two_sided", lower, truth, upper, Some(g))
        .with_check(Check::new("residual vs middle term", res, middle)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{Factor, SeparableSum};
    use crate::manufactured::{make_case, Level};
    use crate::field::VectorField;

    fn exp_sine(kind: ProblemKind) -> ProblemCase {
        let dom = BoxDomain::unit(1).unwrap().with_time_horizon(1.0).unwrap();
        let u = SeparableSum::sine_product(&dom, &[1.0], 1.0, Factor::Exp { rate: -1.0 });
        make_case("e", kind, &dom, &u).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn heat_isometry_closed_form() {
        let case = exp_sine(ProblemKind::Heat);
        let r = heat_isometry_check(&case, &QuadratureRule::default()).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        let decay = 1.0 - (-2f64).exp();
        let lhs = (1.0 + pi2 * pi2) * decay / 4.0 + pi2 * (-2f64).exp() / 2.0;
        let rhs = (pi2 - 1.0).powi(2) * decay / 4.0 + pi2 / 2.0;
        assert!(close(r.lhs_total, lhs, 1e-12));
        assert!(close(r.rhs_total, rhs, 1e-12));
        assert!(r.rel_residual < 1e-12);
    }

    #[test]
    fn trd_equality_zero_pair() {
        let case = exp_sine(ProblemKind::TimeReactionDiffusion);
        let a = ApproxPair {
            u_tilde: ScalarField::zero(),
            p_tilde: VectorField::zero(),
            level: Level::ConformingMixed,
        };
        let r = trd_equality(&case, &a, &QuadratureRule::default()).unwrap();
        let pi4 = std::f64::consts::PI.powi(4);
        let expect = pi4 * (1.0 - (-2f64).exp()) / 4.0 + 0.5;
        assert!(close(r.rhs_total, expect, 1e-12));
        assert!(r.rel_residual < 1e-10);
        assert!(r.worst_residual() < 1e-10);
    }

    #[test]
    fn omega_consistency_with_isometries() {
        let trd = exp_sine(ProblemKind::TimeReactionDiffusion);
        let q = QuadratureRule::default();
        let iso = trd_isometry_check(&trd, &q).unwrap();
        let om = omega_identity_check(&trd.exact_u, 1.0, &trd.dom, &q).unwrap();
        assert!(close(om.lhs_total, iso.rhs_total, 1e-10));
        assert!(close(om.rhs_total, iso.lhs_total, 1e-10));
        for w in [-1.0, 0.0, 0.5, 1.0, 10.0] {
            let r = omega_identity_check(&trd.exact_u, w, &trd.dom, &q).unwrap();
            assert!(r.rel_residual < 1e-10, "omega {w}: {}", r.rel_residual);
            assert!(r.lhs.iter().chain(&r.rhs).all(|c| c.value >= 0.0));
        }
    }

    #[test]
    fn heat_very_conforming_half() {
        let case = exp_sine(ProblemKind::Heat);
        let q = QuadratureRule::default();
        let zero = heat_very_conforming_equality(&case, &ScalarField::zero(), &q).unwrap();
        let half = heat_very_conforming_equality(&case, &case.exact_u.scale(0.5), &q).unwrap();
        assert!(close(half.lhs_total, 0.25 * zero.lhs_total, 1e-12));
        assert!(half.rel_residual < 1e-10);
    }

    #[test]
    fn heat_two_sided_zero_pair_orders() {
        let case = exp_sine(ProblemKind::Heat);
        let a = ApproxPair {
            u_tilde: ScalarField::zero(),
            p_tilde: VectorField::zero(),
            level: Level::ConformingMixed,
        };
        let cf = 1.0 / std::f64::consts::PI;
        let r = heat_two_sided(&case, &a, cf, None, &QuadratureRule::default()).unwrap();
        assert!(r.ordering_holds(1e-9));
        assert!(r.worst_check() < 1e-10);
    }

    #[test]
    fn elliptic_case_rejected() {
        let dom = BoxDomain::unit(1).unwrap();
        let u = SeparableSum::sine_product(&dom, &[1.0], 1.0, Factor::one());
        let rd = make_case("x", ProblemKind::ReactionDiffusion, &dom, &u).unwrap();
        assert!(matches!(
            trd_isometry_check(&rd, &QuadratureRule::default()),
            Err(Error::KindMismatch { .. })
        ));
    }
}
