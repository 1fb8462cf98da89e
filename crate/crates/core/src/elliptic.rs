//! Error equalities and bounds for `-Δu + u = f` and `-Δu = f` with homogeneous
//! Dirichlet conditions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::field::{FieldRef, ScalarField, VectorField};
use crate::manufactured::{ApproxPair, ProblemCase, ProblemKind};
use crate::norms::{l2_norm_sq, norm_components, Component, NormKind};
use crate::quadrature::QuadratureRule;
use crate::report::{BoundReport, Check, EqualityReport};

/// Friedrichs constant together with where it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FriedrichsConstant {
    pub value: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    BoxClosedForm,
    UserSupplied,
}

impl FriedrichsConstant {
    pub fn user_supplied(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Friedrichs constant must be positive, got {value}"
            )));
        }
        Ok(FriedrichsConstant {
            value,
            provenance: Provenance::UserSupplied,
        })
    }
}

/// `1/(π √(Σ 1/Lᵢ²))`, the reciprocal square root of the first Dirichlet eigenvalue of
/// the box. Only the spatial extent matters; the constant carries over to the cylinder.
pub fn friedrichs_constant(dom: &BoxDomain) -> FriedrichsConstant {
    let s: f64 = dom.lengths().iter().map(|l| 1.0 / (l * l)).sum();
    FriedrichsConstant {
        value: 1.0 / (PI * s.sqrt()),
        provenance: Provenance::BoxClosedForm,
    }
}

pub(crate) fn sq(s: &ScalarField, dom: &BoxDomain, q: &QuadratureRule) -> Result<f64> {
    l2_norm_sq(FieldRef::Scalar(s), dom, q)
}

pub(crate) fn sqv(v: &VectorField, dom: &BoxDomain, q: &QuadratureRule) -> Result<f64> {
    l2_norm_sq(FieldRef::Vector(v), dom, q)
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    Ok(())
}

/// Boundary-vanishing with a gradient.
pub(crate) fn require_primal(u: &ScalarField, dom: &BoxDomain) -> Result<()> {
    u.grad_fn()?;
    if !u.conformity().vanishes_on_boundary {
        return Err(Error::Conformity(format!(
            "`{}` must vanish on the boundary",
            u.name()
        )));
    }
    u.validate(dom)
}

pub(crate) fn require_div(p: &VectorField) -> Result<()> {
    p.div_fn().map(|_| ())
}

/// The error `u - ũ` must vanish on the boundary even if `ũ` is only spot-checked.
pub(crate) fn require_error_vanishes(e: &ScalarField, dom: &BoxDomain) -> Result<()> {
    if !e.spot_check_boundary(dom, crate::field::BOUNDARY_TOL) {
        return Err(Error::Conformity(
            "u - u~ does not vanish on the boundary".into(),
        ));
    }
    Ok(())
}

/// `‖u‖²_{H¹} + ‖∇u‖²_{H(div)} = ‖f‖²` for the exact solution.
pub fn rd_isometry(case: &ProblemCase, q: &QuadratureRule) -> Result<EqualityReport> {
    case.require_kind(ProblemKind::ReactionDiffusion)?;
    let lhs = norm_components(NormKind::V, (&case.exact_u).into(), &case.dom, q)?;
    let rhs = vec![Component::new("|f|^2", sq(&case.f, &case.dom, q)?)];
    Ok(EqualityReport::new("rd_isometry", lhs, rhs))
}

/// `‖Δu‖² = ‖f‖²` for the exact solution.
pub fn poisson_isometry(case: &ProblemCase, q: &QuadratureRule) -> Result<EqualityReport> {
    case.require_kind(ProblemKind::Poisson)?;
    let lap = case.exact_u.laplacian_field()?;
    let lhs = vec![Component::new("|lap u|^2", sq(&lap, &case.dom, q)?)];
    let rhs = vec![Component::new("|f|^2", sq(&case.f, &case.dom, q)?)];
    Ok(EqualityReport::new("poisson_isometry", lhs, rhs))
}

/// Conforming mixed equality:
/// `‖u-ũ‖²_{H¹} + ‖p-p̃‖²_{H(div)} = ‖f-ũ+div p̃‖² + ‖p̃-∇ũ‖²`.
pub fn rd_equality(case: &ProblemCase, a: &ApproxPair, q: &QuadratureRule) -> Result<EqualityReport> {
    case.require_kind(ProblemKind::ReactionDiffusion)?;
    let dom = &case.dom;
    let (ut, pt) = (&a.u_tilde, &a.p_tilde);
    require_primal(ut, dom)?;
    require_div(pt)?;
    let e = case.exact_u.sub(ut);
    require_error_vanishes(&e, dom)?;
    let ep = case.exact_p.sub(pt);
    let div_ep = ep.div_field()?;
    let div_pt = pt.div_field()?;

    let lhs = vec![
        Component::new("|u-u~|^2", sq(&e, dom, q)?),
        Component::new("|grad(u-u~)|^2", sqv(&e.gradient_field()?, dom, q)?),
        Component::new("|p-p~|^2", sqv(&ep, dom, q)?),
        Component::new("|div(p-p~)|^2", sq(&div_ep, dom, q)?),
    ];
    let residual = case.f.sub(ut).add(&div_pt);
    let rhs = vec![
        Component::new("|f-u~+div p~|^2", sq(&residual, dom, q)?),
        Component::new("|p~-grad u~|^2", sqv(&pt.sub(&ut.gradient_field()?), dom, q)?),
    ];
    // div(p - p~) = u - f - div p~ from the equation, computed from the data side.
    let data_div = case.exact_u.sub(&case.f).sub(&div_pt);
    let report = EqualityReport::new("rd_equality", lhs.clone(), rhs).with_check(Check::new(
        "div(p-p~) from data",
        lhs[3].value,
        sq(&data_div, dom, q)?,
    ));
    Ok(report)
}

/// Very conforming equality: `‖u-ũ‖²_{H¹} + ‖∇(u-ũ)‖²_{H(div)} = ‖f-ũ+Δũ‖²`.
pub fn rd_very_conforming_equality(
    case: &ProblemCase,
    u_tilde: &ScalarField,
    q: &QuadratureRule,
) -> Result<EqualityReport> {
    case.require_kind(ProblemKind::ReactionDiffusion)?;
    let dom = &case.dom;
    require_primal(u_tilde, dom)?;
    let lap = u_tilde.laplacian_field()?;
    let e = case.exact_u.sub(u_tilde);
    require_error_vanishes(&e, dom)?;
    let lhs = norm_components(NormKind::V, (&e).into(), dom, q)?;
    let rhs = vec![Component::new(
        "|f-u~+lap u~|^2",
        sq(&case.f.sub(u_tilde).add(&lap), dom, q)?,
    )];
    Ok(EqualityReport::new("rd_very_conforming_equality", lhs, rhs))
}

/// Parts of the non-conforming reaction-diffusion bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NcPart {
    /// `‖u-ũ‖²`
    I,
    /// `‖p-p̃‖²`
    Ii,
    /// `‖u-ũ‖² + ‖p-p̃‖²`
    Iii,
}

/// Upper bounds for `L²` approximations through free conforming fields `(φ, ϕ)`:
/// factor `1+1/γ` on the residual terms, `1+γ` on the distance to `(ũ, p̃)`.
pub fn rd_nonconforming_bounds(
    case: &ProblemCase,
    a: &ApproxPair,
    phi: &ScalarField,
    flux: &VectorField,
    gamma: f64,
    which: NcPart,
    q: &QuadratureRule,
) -> Result<BoundReport> {
    case.require_kind(ProblemKind::ReactionDiffusion)?;
    check_gamma(gamma)?;
    let dom = &case.dom;
    require_primal(phi, dom)?;
    require_div(flux)?;
    let (ut, pt) = (&a.u_tilde, &a.p_tilde);

    let res = sq(&case.f.sub(phi).add(&flux.div_field()?), dom, q)?;
    let gap = sqv(&flux.sub(&phi.gradient_field()?), dom, q)?;
    let du = sq(&phi.sub(ut), dom, q)?;
    let dp = sqv(&flux.sub(pt), dom, q)?;
    let err_u = sq(&case.exact_u.sub(ut), dom, q)?;
    let err_p = sqv(&case.exact_p.sub(pt), dom, q)?;

    let a1 = 1.0 + 1.0 / gamma;
    let a2 = 1.0 + gamma;
    let (name, upper, truth) = match which {
        NcPart::I => (
            "rd_nonconforming_i",
            vec![
                Component::new("(1+1/g)|f-phi+div flux|^2", a1 * res),
                Component::new("(1+1/g)/2 |flux-grad phi|^2", a1 * 0.5 * gap),
                Component::new("(1+g)|phi-u~|^2", a2 * du),
            ],
            vec![Component::new("|u-u~|^2", err_u)],
        ),
        NcPart::Ii => (
            "rd_nonconforming_ii",
            vec![
                Component::new("(1+1/g)/2 |f-phi+div flux|^2", a1 * 0.5 * res),
                Component::new("(1+1/g)|flux-grad phi|^2", a1 * gap),
                Component::new("(1+g)|flux-p~|^2", a2 * dp),
            ],
            vec![Component::new("|p-p~|^2", err_p)],
        ),
        NcPart::Iii => (
            "rd_nonconforming_iii",
            vec![
                Component::new("(1+1/g)|f-phi+div flux|^2", a1 * res),
                Component::new("(1+1/g)|flux-grad phi|^2", a1 * gap),
                Component::new("(1+g)|phi-u~|^2", a2 * du),
                Component::new("(1+g)|flux-p~|^2", a2 * dp),
            ],
            vec![
                Component::new("|u-u~|^2", err_u),
                Component::new("|p-p~|^2", err_p),
            ],
        ),
    };
    Ok(BoundReport::new(name, Vec::new(), truth, upper, Some(gamma)))
}

/// Which of `ũ` (`I`) or `p̃` (`Ii`) is conforming in a semi-conforming pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemiPart {
    I,
    Ii,
}

/// Two-sided bounds for semi-conforming pairs. Part `I` uses the free flux, part `Ii`
/// the free potential; the other free argument is ignored. The weaker variant with a
/// common factor `1+1/γ` is reported in `extra`.
pub fn rd_semiconforming_bounds(
    case: &ProblemCase,
    a: &ApproxPair,
    phi: &ScalarField,
    flux: &VectorField,
    gamma: f64,
    part: SemiPart,
    q: &QuadratureRule,
) -> Result<BoundReport> {
    case.require_kind(ProblemKind::ReactionDiffusion)?;
    check_gamma(gamma)?;
    let dom = &case.dom;
    let (ut, pt) = (&a.u_tilde, &a.p_tilde);
    let a1 = 1.0 + 1.0 / gamma;
    let a_half = 1.0 + 1.0 / (2.0 * gamma);
    let a2 = 1.0 + gamma;
    match part {
        SemiPart::I => {
            require_primal(ut, dom)?;
            require_div(flux)?;
            let e = case.exact_u.sub(ut);
            require_error_vanishes(&e, dom)?;
            let grad_ut = ut.gradient_field()?;
            let res = sq(&case.f.sub(ut).add(&flux.div_field()?), dom, q)?;
            let gap = sqv(&flux.sub(&grad_ut), dom, q)?;
            let dp = sqv(&flux.sub(pt), dom, q)?;
            let own_gap = sqv(&pt.sub(&grad_ut), dom, q)?;
            let truth = vec![
                Component::new("|u-u~|^2", sq(&e, dom, q)?),
                Component::new("|grad(u-u~)|^2", sqv(&e.gradient_field()?, dom, q)?),
                Component::new("|p-p~|^2", sqv(&case.exact_p.sub(pt), dom, q)?),
            ];
            let upper = vec![
                Component::new("(1+1/(2g))|f-u~+div flux|^2", a_half * res),
                Component::new("(1+1/g)|flux-grad u~|^2", a1 * gap),
                Component::new("(1+g)|flux-p~|^2", a2 * dp),
            ];
            let lower = vec![Component::new("|p~-grad u~|^2/2", 0.5 * own_gap)];
            Ok(
                BoundReport::new("rd_semiconforming_i", lower, truth, upper, Some(gamma))
                    .with_extra(Component::new("basic_upper", a1 * (res + gap) + a2 * dp)),
            )
        }
        SemiPart::Ii => {
            require_div(pt)?;
            require_primal(phi, dom)?;
            let div_pt = pt.div_field()?;
            let res_phi = sq(&case.f.sub(phi).add(&div_pt), dom, q)?;
            let gap = sqv(&pt.sub(&phi.gradient_field()?), dom, q)?;
            let du = sq(&phi.sub(ut), dom, q)?;
            let own_res = sq(&case.f.sub(ut).add(&div_pt), dom, q)?;
            let ep = case.exact_p.sub(pt);
            let truth = vec![
                Component::new("|u-u~|^2", sq(&case.exact_u.sub(ut), dom, q)?),
                Component::new("|p-p~|^2", sqv(&ep, dom, q)?),
                Component::new("|div(p-p~)|^2", sq(&ep.div_field()?, dom, q)?),
            ];
            let upper = vec![
                Component::new("(1+1/g)|f-phi+div p~|^2", a1 * res_phi),
                Component::new("(1+1/(2g))|p~-grad phi|^2", a_half * gap),
                Component::new("(1+g)|phi-u~|^2", a2 * du),
            ];
            let lower = vec![Component::new("|f-u~+div p~|^2/2", 0.5 * own_res)];
            Ok(
                BoundReport::new("rd_semiconforming_ii", lower, truth, upper, Some(gamma))
                    .with_extra(Component::new("basic_upper", a1 * (res_phi + gap) + a2 * du)),
            )
        }
    }
}

/// Coefficients `(residual, gap)` of the Poisson and heat majorants for Young
/// parameter `γ > 1`; `γ = 2` gives `(1 + 4c², 2)`.
pub fn mixed_upper_coefficients(cf: f64, gamma: f64) -> Result<(f64, f64)> {
    if !(gamma.is_finite() && gamma > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must exceed 1 for this bound, got {gamma}"
        )));
    }
    let s = gamma / (gamma - 1.0);
    Ok((1.0 + gamma * s * cf * cf, s))
}

/// Default Young parameter of the conforming Poisson and heat majorants.
pub const DEFAULT_MIXED_GAMMA: f64 = 2.0;

/// Two-sided bound for conforming mixed Poisson approximations. `gamma = None` uses 2.
pub fn poisson_two_sided(
    case: &ProblemCase,
    a: &ApproxPair,
    cf: f64,
    gamma: Option<f64>,
    q: &QuadratureRule,
) -> Result<BoundReport> {
    case.require_kind(ProblemKind::Poisson)?;
    let g = gamma.unwrap_or(DEFAULT_MIXED_GAMMA);
    let (c_res, c_gap) = mixed_upper_coefficients(cf, g)?;
    let dom = &case.dom;
    let (ut, pt) = (&a.u_tilde, &a.p_tilde);
    require_primal(ut, dom)?;
    require_div(pt)?;
    let e = case.exact_u.sub(ut);
    require_error_vanishes(&e, dom)?;
    let div_pt = pt.div_field()?;
    let res = sq(&case.f.add(&div_pt), dom, q)?;
    let gap = sqv(&pt.sub(&ut.gradient_field()?), dom, q)?;
    let ep = case.exact_p.sub(pt);
    let div_err = sq(&ep.div_field()?, dom, q)?;
    let truth = vec![
        Component::new("|grad(u-u~)|^2", sqv(&e.gradient_field()?, dom, q)?),
        Component::new("|p-p~|^2", sqv(&ep, dom, q)?),
        Component::new("|div(p-p~)|^2", div_err),
    ];
    let lower = vec![
        Component::new("|f+div p~|^2+|p~-grad u~|^2/2", res + 0.5 * gap),
        Component::new("|p~-grad u~|^2/(1+c^2)", gap / (1.0 + cf * cf)),
    ];
    let upper = vec![
        Component::new("c_res|f+div p~|^2", c_res * res),
        Component::new("c_gap|p~-grad u~|^2", c_gap * gap),
    ];
    Ok(BoundReport::new("poisson_two_sided", lower, truth, upper, Some(g))
        .with_check(Check::new("|f+div p~|^2 vs |div(p-p~)|^2", res, div_err)))
}

/// `‖Δ(u-ũ)‖ = ‖f+Δũ‖`, reported in squared form.
pub fn poisson_very_conforming_equality(
    case: &ProblemCase,
    u_tilde: &ScalarField,
    q: &QuadratureRule,
) -> Result<EqualityReport> {
    case.require_kind(ProblemKind::Poisson)?;
    let dom = &case.dom;
    require_primal(u_tilde, dom)?;
    let lap = u_tilde.laplacian_field()?;
    let e = case.exact_u.sub(u_tilde);
    require_error_vanishes(&e, dom)?;
    let lhs = vec![Component::new("|lap(u-u~)|^2", sq(&e.laplacian_field()?, dom, q)?)];
    let rhs = vec![Component::new("|f+lap u~|^2", sq(&case.f.add(&lap), dom, q)?)];
    Ok(EqualityReport::new("poisson_very_conforming_equality", lhs, rhs))
}

/// Parts of the non-conforming Poisson bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoissonNcPart {
    /// `‖u-ũ‖`, unsquared
    I,
    /// `‖p-p̃‖²`
    Ii,
    /// `‖∇(u-ũ)‖² + ‖p-p̃‖²` for conforming `ũ`, with a lower bound
    MixedI,
    /// `‖u-ũ‖² + ‖p-p̃‖²_{H(div)}` for div-conforming `p̃`
    MixedIi,
}

/// Non-conforming Poisson bounds with free potential `φ` and free flux `ϕ`.
///
/// In the mixed parts the same free flux serves both flux slots of the bound (`θ = ϕ`),
/// the same potential both potential slots, and `mixed_ii` pairs `p̃` with itself in the
/// second slot. Part `I` is an unsquared bound: `upper` and `true_total` hold its
/// square, and `extra` carries the unsquared values.
pub fn poisson_nonconforming(
    case: &ProblemCase,
    a: &ApproxPair,
    phi: &ScalarField,
    flux: &VectorField,
    cf: f64,
    which: PoissonNcPart,
    q: &QuadratureRule,
) -> Result<BoundReport> {
    case.require_kind(ProblemKind::Poisson)?;
    if !(cf.is_finite() && cf > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Friedrichs constant must be positive, got {cf}"
        )));
    }
    let dom = &case.dom;
    require_primal(phi, dom)?;
    require_div(flux)?;
    let (ut, pt) = (&a.u_tilde, &a.p_tilde);
    let grad_phi = phi.gradient_field()?;
    let res = sq(&case.f.add(&flux.div_field()?), dom, q)?.sqrt();
    let ep = case.exact_p.sub(pt);
    match which {
        PoissonNcPart::I => {
            let gap = sqv(&flux.sub(&grad_phi), dom, q)?.sqrt();
            let dist = sq(&phi.sub(ut), dom, q)?.sqrt();
            let err = sq(&case.exact_u.sub(ut), dom, q)?;
            let terms = vec![
                Component::new("c^2|f+div flux|", cf * cf * res),
                Component::new("c|flux-grad phi|", cf * gap),
                Component::new("|phi-u~|", dist),
            ];
            let bound: f64 = terms.iter().map(|c| c.value).sum();
            Ok(BoundReport::with_upper(
                "poisson_nonconforming_i",
                Vec::new(),
                vec![Component::new("|u-u~|^2", err)],
                terms,
                bound * bound,
                None,
            )
            .with_extra(Component::new("upper_unsquared", bound))
            .with_extra(Component::new("true_unsquared", err.sqrt())))
        }
        PoissonNcPart::Ii => {
            let dist = sqv(&flux.sub(pt), dom, q)?.sqrt();
            let gap = sqv(&pt.sub(&grad_phi), dom, q)?;
            let first = cf * res + dist;
            Ok(BoundReport::new(
                "poisson_nonconforming_ii",
                Vec::new(),
                vec![Component::new("|p-p~|^2", sqv(&ep, dom, q)?)],
                vec![
                    Component::new("(c|f+div flux|+|flux-p~|)^2", first * first),
                    Component::new("|p~-grad phi|^2", gap),
                ],
                None,
            ))
        }
        PoissonNcPart::MixedI => {
            require_primal(ut, dom)?;
            let e = case.exact_u.sub(ut);
            require_error_vanishes(&e, dom)?;
            let grad_ut = ut.gradient_field()?;
            let theta_gap = sqv(&flux.sub(&grad_ut), dom, q)?.sqrt();
            let dist = sqv(&flux.sub(pt), dom, q)?.sqrt();
            let gap = sqv(&pt.sub(&grad_phi), dom, q)?;
            let t1 = cf * res + theta_gap;
            let t2 = cf * res + dist;
            Ok(BoundReport::new(
                "poisson_nonconforming_mixed_i",
                vec![Component::new(
                    "|p~-grad u~|^2/2",
                    0.5 * sqv(&pt.sub(&grad_ut), dom, q)?,
                )],
                vec![
                    Component::new("|grad(u-u~)|^2", sqv(&e.gradient_field()?, dom, q)?),
                    Component::new("|p-p~|^2", sqv(&ep, dom, q)?),
                ],
                vec![
                    Component::new("(c|f+div theta|+|theta-grad u~|)^2", t1 * t1),
                    Component::new("(c|f+div flux|+|flux-p~|)^2", t2 * t2),
                    Component::new("|p~-grad phi|^2", gap),
                ],
                None,
            ))
        }
        PoissonNcPart::MixedIi => {
            require_div(pt)?;
            let gap_theta = sqv(&flux.sub(&grad_phi), dom, q)?.sqrt();
            let dist = sq(&phi.sub(ut), dom, q)?.sqrt();
            let own_res = sq(&case.f.add(&pt.div_field()?), dom, q)?;
            let gap = sqv(&pt.sub(&grad_phi), dom, q)?;
            let t1 = cf * cf * res + cf * gap_theta + dist;
            Ok(BoundReport::new(
                "poisson_nonconforming_mixed_ii",
                Vec::new(),
                vec![
                    Component::new("|u-u~|^2", sq(&case.exact_u.sub(ut), dom, q)?),
                    Component::new("|p-p~|^2", sqv(&ep, dom, q)?),
                    Component::new("|div(p-p~)|^2", sq(&ep.div_field()?, dom, q)?),
                ],
                vec![
                    Component::new("(c^2|f+div theta|+c|theta-grad psi|+|psi-u~|)^2", t1 * t1),
                    Component::new("(c^2+1)|f+div p~|^2", (cf * cf + 1.0) * own_res),
                    Component::new("|p~-grad phi|^2", gap),
                ],
                None,
            ))
        }
    }
}

/// `c‖Δw‖ - ‖∇w‖`, non-negative for boundary-vanishing `w` when `c` is a valid
/// Friedrichs constant.
pub fn cftwo_check(w: &ScalarField, cf: f64, dom: &BoxDomain, q: &QuadratureRule) -> Result<f64> {
    require_primal(w, dom)?;
    let lap = sq(&w.laplacian_field()?, dom, q)?.sqrt();
    let grad = sqv(&w.gradient_field()?, dom, q)?.sqrt();
    Ok(cf * lap - grad)
}

/// `c‖∇w‖ - ‖w‖` for boundary-vanishing `w`.
pub fn friedrichs_margin(
    w: &ScalarField,
    cf: f64,
    dom: &BoxDomain,
    q: &QuadratureRule,
) -> Result<f64> {
    require_primal(w, dom)?;
    let grad = sqv(&w.gradient_field()?, dom, q)?.sqrt();
    Ok(cf * grad - sq(w, dom, q)?.sqrt())
}
