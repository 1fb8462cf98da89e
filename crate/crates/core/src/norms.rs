//! Inner products, composite norms, time traces and the integration-by-parts self tests.

use serde::{Deserialize, Serialize};

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::field::{FieldRef, ScalarField, ScalarFn, SpaceVec, VectorField, VectorFn};
use crate::quadrature::{QuadGrid, QuadratureRule, Region};

/// Floor used in every relative residual so exact approximations give `0`, not `0/0`.
pub const RESIDUAL_FLOOR: f64 = 1e-14;

/// `|a - b| / max(|a|, |b|, floor)`.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(RESIDUAL_FLOOR)
}

/// Both sides of a checked identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub lhs: f64,
    pub rhs: f64,
    pub absolute: f64,
    pub relative: f64,
}

impl Residual {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Residual {
            lhs,
            rhs,
            absolute: (lhs - rhs).abs(),
            relative: relative_gap(lhs, rhs),
        }
    }
}

#[inline]
fn dot(a: &SpaceVec, b: &SpaceVec, d: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..d {
        s += a[i] * b[i];
    }
    s
}

fn check_region(field: FieldRef<'_>, dom: &BoxDomain) -> Result<()> {
    if field.is_time_dependent() && !dom.is_parabolic() {
        return Err(Error::MissingTimeHorizon);
    }
    Ok(())
}

pub(crate) fn l2_scalar_fns(
    a: &ScalarFn,
    b: &ScalarFn,
    dom: &BoxDomain,
    q: &QuadratureRule,
    region: Region,
) -> f64 {
    QuadGrid::new(dom, q, region).integrate(|p| a(p) * b(p))
}

pub(crate) fn l2_vector_fns(
    a: &VectorFn,
    b: &VectorFn,
    dom: &BoxDomain,
    q: &QuadratureRule,
    region: Region,
) -> f64 {
    let d = dom.dim();
    QuadGrid::new(dom, q, region).integrate(|p| dot(&a(p), &b(p), d))
}

fn sq_scalar(a: &ScalarFn, dom: &BoxDomain, q: &QuadratureRule, region: Region) -> f64 {
    QuadGrid::new(dom, q, region).integrate(|p| {
        let v = a(p);
        v * v
    })
}

fn sq_vector(a: &VectorFn, dom: &BoxDomain, q: &QuadratureRule, region: Region) -> f64 {
    let d = dom.dim();
    QuadGrid::new(dom, q, region).integrate(|p| {
        let v = a(p);
        dot(&v, &v, d)
    })
}

/// `⟨a, b⟩` in `L²(Ω)` (elliptic domain) or `L²(Ξ)` (parabolic domain).
pub fn l2_inner(a: FieldRef<'_>, b: FieldRef<'_>, dom: &BoxDomain, q: &QuadratureRule) -> Result<f64> {
    check_region(a, dom)?;
    check_region(b, dom)?;
    match (a, b) {
        (FieldRef::Scalar(a), FieldRef::Scalar(b)) => {
            Ok(l2_scalar_fns(a.value_fn(), b.value_fn(), dom, q, Region::Domain))
        }
        (FieldRef::Vector(a), FieldRef::Vector(b)) => {
            Ok(l2_vector_fns(a.value_fn(), b.value_fn(), dom, q, Region::Domain))
        }
        _ => Err(Error::RankMismatch),
    }
}

/// `‖w‖²` in `L²(Ω)` or `L²(Ξ)`.
pub fn l2_norm_sq(w: FieldRef<'_>, dom: &BoxDomain, q: &QuadratureRule) -> Result<f64> {
    check_region(w, dom)?;
    Ok(match w {
        FieldRef::Scalar(f) => sq_scalar(f.value_fn(), dom, q, Region::Domain),
        FieldRef::Vector(f) => sq_vector(f.value_fn(), dom, q, Region::Domain),
    })
}

/// Norm families. Spatial derivatives are integrated over the whole domain, so on a
/// space-time cylinder `H1` is the `H⁰¹(Ξ)` norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// `‖w‖²`
    L2,
    /// `‖w‖² + ‖∇w‖²`
    H1,
    /// `‖ψ‖² + ‖div ψ‖²`
    Hdiv,
    /// `‖w‖² + 2‖∇w‖² + ‖Δw‖²`
    V,
    /// `‖w‖² + ‖∇w‖² + ‖∂ₜw‖²` (parabolic)
    H11,
    /// `‖w‖²_{H¹¹} + ‖∇w‖²_{H(div)} + ‖w(T)‖²_{H¹}` (parabolic)
    WStar,
    /// `‖∂ₜw‖² + ‖Δw‖² + ‖∇w(T)‖²` (parabolic)
    Triple,
}

/// A named contribution to a norm or estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub name: String,
    pub value: f64,
}

impl Component {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Component {
            name: name.into(),
            value,
        }
    }
}

/// Sum of component values, in order, compensated.
pub fn total(components: &[Component]) -> f64 {
    let v: Vec<f64> = components.iter().map(|c| c.value).collect();
    crate::quadrature::compensated_sum(&v)
}

/// Constituent squared norms of `kind` for `w`; the norm is their sum.
pub fn norm_components(
    kind: NormKind,
    w: FieldRef<'_>,
    dom: &BoxDomain,
    q: &QuadratureRule,
) -> Result<Vec<Component>> {
    check_region(w, dom)?;
    if matches!(kind, NormKind::H11 | NormKind::WStar | NormKind::Triple) && !dom.is_parabolic() {
        return Err(Error::NotParabolic);
    }
    let scalar = |w: FieldRef<'_>| match w {
        FieldRef::Scalar(s) => Ok(s.clone()),
        FieldRef::Vector(_) => Err(Error::RankMismatch),
    };
    let r = Region::Domain;
    match kind {
        NormKind::L2 => Ok(vec![Component::new("|w|^2", l2_norm_sq(w, dom, q)?)]),
        NormKind::Hdiv => {
            let FieldRef::Vector(v) = w else {
                return Err(Error::RankMismatch);
            };
            let div = v.div_fn()?;
            Ok(vec![
                Component::new("|w|^2", sq_vector(v.value_fn(), dom, q, r)),
                Component::new("|div w|^2", sq_scalar(div, dom, q, r)),
            ])
        }
        NormKind::H1 => {
            let s = scalar(w)?;
            let g = s.grad_fn()?;
            Ok(vec![
                Component::new("|w|^2", sq_scalar(s.value_fn(), dom, q, r)),
                Component::new("|grad w|^2", sq_vector(g, dom, q, r)),
            ])
        }
        NormKind::V => {
            let s = scalar(w)?;
            let g = s.grad_fn()?;
            let l = s.laplacian_fn()?;
            let grad = sq_vector(g, dom, q, r);
            Ok(vec![
                Component::new("|w|^2", sq_scalar(s.value_fn(), dom, q, r)),
                Component::new("|grad w|^2", grad),
                Component::new("|grad w|^2", grad),
                Component::new("|lap w|^2", sq_scalar(l, dom, q, r)),
            ])
        }
        NormKind::H11 => {
            let s = scalar(w)?;
            let g = s.grad_fn()?;
            let d = s.dt_fn()?;
            Ok(vec![
                Component::new("|w|^2", sq_scalar(s.value_fn(), dom, q, r)),
                Component::new("|grad w|^2", sq_vector(g, dom, q, r)),
                Component::new("|dt w|^2", sq_scalar(d, dom, q, r)),
            ])
        }
        NormKind::WStar => {
            let s = scalar(w)?;
            let horizon = dom.require_time_horizon()?;
            let l = s.laplacian_fn()?;
            let mut out = norm_components(NormKind::H11, w, dom, q)?;
            let grad = out[1].value;
            out.push(Component::new("|grad w|^2", grad));
            out.push(Component::new("|lap w|^2", sq_scalar(l, dom, q, r)));
            out.push(Component::new(
                "|w(T)|^2",
                sq_scalar(s.value_fn(), dom, q, Region::Slice(horizon)),
            ));
            out.push(Component::new(
                "|grad w(T)|^2",
                sq_vector(s.grad_fn()?, dom, q, Region::Slice(horizon)),
            ));
            Ok(out)
        }
        NormKind::Triple => {
            let s = scalar(w)?;
            let horizon = dom.require_time_horizon()?;
            Ok(vec![
                Component::new("|dt w|^2", sq_scalar(s.dt_fn()?, dom, q, r)),
                Component::new("|lap w|^2", sq_scalar(s.laplacian_fn()?, dom, q, r)),
                Component::new(
                    "|grad w(T)|^2",
                    sq_vector(s.grad_fn()?, dom, q, Region::Slice(horizon)),
                ),
            ])
        }
    }
}

/// Squared norm of the given kind.
pub fn norm_sq(kind: NormKind, w: FieldRef<'_>, dom: &BoxDomain, q: &QuadratureRule) -> Result<f64> {
    Ok(total(&norm_components(kind, w, dom, q)?))
}

/// Time level of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeLevel {
    Initial,
    Terminal,
}

/// Which spatial norm of the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceVariant {
    Value,
    Gradient,
    H1,
}

/// `‖w(t,·)‖²`, `‖∇w(t,·)‖²` or `‖w(t,·)‖²_{H¹}` at `t ∈ {0, T}`.
pub fn trace_norm_sq(
    w: FieldRef<'_>,
    at: TimeLevel,
    variant: TraceVariant,
    dom: &BoxDomain,
    q: &QuadratureRule,
) -> Result<f64> {
    let horizon = dom.require_time_horizon()?;
    let t = match at {
        TimeLevel::Initial => 0.0,
        TimeLevel::Terminal => horizon,
    };
    let region = Region::Slice(t);
    match (w, variant) {
        (FieldRef::Scalar(s), TraceVariant::Value) => Ok(sq_scalar(s.value_fn(), dom, q, region)),
        (FieldRef::Vector(v), TraceVariant::Value) => Ok(sq_vector(v.value_fn(), dom, q, region)),
        (FieldRef::Scalar(s), TraceVariant::Gradient) => {
            Ok(sq_vector(s.grad_fn()?, dom, q, region))
        }
        (FieldRef::Scalar(s), TraceVariant::H1) => {
            let g = sq_vector(s.grad_fn()?, dom, q, region);
            Ok(sq_scalar(s.value_fn(), dom, q, region) + g)
        }
        (FieldRef::Vector(_), _) => Err(Error::RankMismatch),
    }
}

/// `2⟨∂ₜw, w⟩` against `‖w(T)‖² - ‖w(0)‖²`.
pub fn timecross_check(w: FieldRef<'_>, dom: &BoxDomain, q: &QuadratureRule) -> Result<Residual> {
    dom.require_time_horizon()?;
    let cross = match w {
        FieldRef::Scalar(s) => l2_scalar_fns(s.dt_fn()?, s.value_fn(), dom, q, Region::Domain),
        FieldRef::Vector(v) => l2_vector_fns(v.dt_fn()?, v.value_fn(), dom, q, Region::Domain),
    };
    let end = trace_norm_sq(w, TimeLevel::Terminal, TraceVariant::Value, dom, q)?;
    let start = trace_norm_sq(w, TimeLevel::Initial, TraceVariant::Value, dom, q)?;
    Ok(Residual::new(2.0 * cross, end - start))
}

/// `⟨∇u, ψ⟩` against `-⟨u, div ψ⟩` for boundary-vanishing `u`.
pub fn partint_residual(
    u: &ScalarField,
    psi: &VectorField,
    dom: &BoxDomain,
    q: &QuadratureRule,
) -> Result<Residual> {
    if !u.conformity().vanishes_on_boundary {
        return Err(Error::Conformity(format!(
            "`{}` must vanish on the boundary",
            u.name()
        )));
    }
    check_region(FieldRef::Scalar(u), dom)?;
    check_region(FieldRef::Vector(psi), dom)?;
    let grad_psi = l2_vector_fns(u.grad_fn()?, psi.value_fn(), dom, q, Region::Domain);
    let u_div = l2_scalar_fns(u.value_fn(), psi.div_fn()?, dom, q, Region::Domain);
    Ok(Residual::new(grad_psi, -u_div))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine_1d() -> ScalarField {
        ScalarField::new("sin", |p| (PI * p.x[0]).sin())
            .with_grad(|p| [PI * (PI * p.x[0]).cos(), 0.0, 0.0])
            .with_laplacian(|p| -PI * PI * (PI * p.x[0]).sin())
            .vanishing(true)
    }

    #[test]
    fn rank_mismatch() {
        let dom = BoxDomain::unit(1).unwrap();
        let q = QuadratureRule::default();
        let s = sine_1d();
        let v = VectorField::zero();
        assert_eq!(
            l2_inner((&s).into(), (&v).into(), &dom, &q),
            Err(Error::RankMismatch)
        );
    }

    #[test]
    fn time_dependent_needs_horizon() {
        let dom = BoxDomain::unit(1).unwrap();
        let q = QuadratureRule::default();
        let s = ScalarField::new("t", |p| p.t).time_dependent(true);
        assert_eq!(
            l2_norm_sq((&s).into(), &dom, &q),
            Err(Error::MissingTimeHorizon)
        );
        assert_eq!(
            trace_norm_sq((&s).into(), TimeLevel::Terminal, TraceVariant::Value, &dom, &q),
            Err(Error::NotParabolic)
        );
    }

    #[test]
    fn kind_requirements() {
        let dom = BoxDomain::unit(1).unwrap();
        let q = QuadratureRule::default();
        let bare = ScalarField::new("bare", |_| 1.0);
        assert!(norm_sq(NormKind::H1, (&bare).into(), &dom, &q).is_err());
        assert!(norm_sq(NormKind::H11, (&sine_1d()).into(), &dom, &q).is_err());
        let v = VectorField::new("v", |_| [1.0, 0.0, 0.0]);
        assert!(norm_sq(NormKind::Hdiv, (&v).into(), &dom, &q).is_err());
        assert_eq!(
            norm_sq(NormKind::H1, (&v).into(), &dom, &q),
            Err(Error::RankMismatch)
        );
    }

    #[test]
    fn partint_requires_vanishing() {
        let dom = BoxDomain::unit(1).unwrap();
        let q = QuadratureRule::default();
        let u = sine_1d().vanishing(false);
        assert!(partint_residual(&u, &VectorField::zero(), &dom, &q).is_err());
    }

    #[test]
    fn relative_gap_floor() {
        assert_eq!(relative_gap(0.0, 0.0), 0.0);
        assert!((relative_gap(1.0, 2.0) - 0.5).abs() < 1e-16);
    }
}
