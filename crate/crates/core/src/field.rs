//! Pointwise-evaluable scalar and vector fields with declared derivative capabilities.
//!
//! Derivatives are never computed numerically: whoever builds a field supplies the
//! evaluators for its gradient, Laplacian, divergence or time derivative. Combining
//! fields (`add`, `sub`, `scale`) keeps exactly the capabilities both operands share.

use std::fmt;
use std::sync::Arc;

use crate::domain::{BoxDomain, MAX_DIM};
use crate::error::{Error, Result};

/// Spatial vector; components beyond the domain dimension are zero.
pub type SpaceVec = [f64; MAX_DIM];

/// A point of the (space-time) domain. Elliptic evaluations use `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub t: f64,
    pub x: SpaceVec,
}

impl Point {
    pub fn space(x: &[f64]) -> Self {
        Point::new(0.0, x)
    }

    pub fn new(t: f64, x: &[f64]) -> Self {
        let mut v = [0.0; MAX_DIM];
        v[..x.len()].copy_from_slice(x);
        Point { t, x: v }
    }
}

pub type ScalarFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&Point) -> SpaceVec + Send + Sync>;

/// Capability flags advertised by a scalar field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalarConformity {
    pub vanishes_on_boundary: bool,
    pub has_grad: bool,
    pub has_laplacian: bool,
    pub has_dt: bool,
}

/// Capability flags advertised by a vector field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VectorConformity {
    pub has_div: bool,
    pub has_dt: bool,
}

#[derive(Clone)]
pub struct ScalarField {
    name: Arc<str>,
    value: ScalarFn,
    grad: Option<VectorFn>,
    laplacian: Option<ScalarFn>,
    dt: Option<ScalarFn>,
    vanishes_on_boundary: bool,
    time_dependent: bool,
}

#[derive(Clone)]
pub struct VectorField {
    name: Arc<str>,
    value: VectorFn,
    div: Option<ScalarFn>,
    dt: Option<VectorFn>,
    time_dependent: bool,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("name", &self.name)
            .field("conformity", &self.conformity())
            .field("time_dependent", &self.time_dependent)
            .finish()
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorField")
            .field("name", &self.name)
            .field("conformity", &self.conformity())
            .field("time_dependent", &self.time_dependent)
            .finish()
    }
}

fn vadd(a: SpaceVec, b: SpaceVec) -> SpaceVec {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn vsub(a: SpaceVec, b: SpaceVec) -> SpaceVec {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn vscale(c: f64, a: SpaceVec) -> SpaceVec {
    [c * a[0], c * a[1], c * a[2]]
}

fn combine_scalar(
    a: &Option<ScalarFn>,
    b: &Option<ScalarFn>,
    op: fn(f64, f64) -> f64,
) -> Option<ScalarFn> {
    match (a, b) {
        (Some(a), Some(b)) => {
            let (a, b) = (a.clone(), b.clone());
            Some(Arc::new(move |p: &Point| op(a(p), b(p))))
        }
        _ => None,
    }
}

fn combine_vector(
    a: &Option<VectorFn>,
    b: &Option<VectorFn>,
    op: fn(SpaceVec, SpaceVec) -> SpaceVec,
) -> Option<VectorFn> {
    match (a, b) {
        (Some(a), Some(b)) => {
            let (a, b) = (a.clone(), b.clone());
            Some(Arc::new(move |p: &Point| op(a(p), b(p))))
        }
        _ => None,
    }
}

fn scale_scalar(c: f64, a: &Option<ScalarFn>) -> Option<ScalarFn> {
    a.as_ref().map(|a| {
        let a = a.clone();
        Arc::new(move |p: &Point| c * a(p)) as ScalarFn
    })
}

fn scale_vector(c: f64, a: &Option<VectorFn>) -> Option<VectorFn> {
    a.as_ref().map(|a| {
        let a = a.clone();
        Arc::new(move |p: &Point| vscale(c, a(p))) as VectorFn
    })
}

impl ScalarField {
    /// A field with only a value evaluator; add capabilities with the `with_*` builders.
    pub fn new(name: &str, value: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField {
            name: name.into(),
            value: Arc::new(value),
            grad: None,
            laplacian: None,
            dt: None,
            vanishes_on_boundary: false,
            time_dependent: false,
        }
    }

    /// The zero field, which has every capability and vanishes everywhere.
    pub fn zero() -> Self {
        ScalarField::new("0", |_| 0.0)
            .with_grad(|_| [0.0; MAX_DIM])
            .with_laplacian(|_| 0.0)
            .with_dt(|_| 0.0)
            .vanishing(true)
    }

    pub fn with_grad(mut self, g: impl Fn(&Point) -> SpaceVec + Send + Sync + 'static) -> Self {
        self.grad = Some(Arc::new(g));
        self
    }

    pub fn with_laplacian(mut self, l: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        self.laplacian = Some(Arc::new(l));
        self
    }

    pub fn with_dt(mut self, d: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        self.dt = Some(Arc::new(d));
        self
    }

    /// Declare (or retract) that the field vanishes on the spatial boundary.
    pub fn vanishing(mut self, yes: bool) -> Self {
        self.vanishes_on_boundary = yes;
        self
    }

    /// Declare that the field depends on time and therefore needs a space-time domain.
    pub fn time_dependent(mut self, yes: bool) -> Self {
        self.time_dependent = yes;
        self
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_time_dependent(&self) -> bool {
        self.time_dependent
    }

    pub fn conformity(&self) -> ScalarConformity {
        ScalarConformity {
            vanishes_on_boundary: self.vanishes_on_boundary,
            has_grad: self.grad.is_some(),
            has_laplacian: self.laplacian.is_some(),
            has_dt: self.dt.is_some(),
        }
    }

    #[inline]
    pub fn eval(&self, p: &Point) -> f64 {
        (self.value)(p)
    }

    pub fn value_fn(&self) -> &ScalarFn {
        &self.value
    }

    pub fn grad_fn(&self) -> Result<&VectorFn> {
        self.grad
            .as_ref()
            .ok_or_else(|| Error::missing(&self.name, "grad"))
    }

    pub fn laplacian_fn(&self) -> Result<&ScalarFn> {
        self.laplacian
            .as_ref()
            .ok_or_else(|| Error::missing(&self.name, "laplacian"))
    }

    pub fn dt_fn(&self) -> Result<&ScalarFn> {
        self.dt
            .as_ref()
            .ok_or_else(|| Error::missing(&self.name, "dt"))
    }

    pub fn grad(&self, p: &Point) -> Result<SpaceVec> {
        Ok(self.grad_fn()?(p))
    }

    pub fn laplacian(&self, p: &Point) -> Result<f64> {
        Ok(self.laplacian_fn()?(p))
    }

    pub fn dt(&self, p: &Point) -> Result<f64> {
        Ok(self.dt_fn()?(p))
    }

    /// `∇w` as a vector field; its divergence is `Δw` when the Laplacian is known.
    pub fn gradient_field(&self) -> Result<VectorField> {
        let g = self.grad_fn()?.clone();
        Ok(VectorField {
            name: format!("grad({})", self.name).into(),
            value: g,
            div: self.laplacian.clone(),
            dt: None,
            time_dependent: self.time_dependent,
        })
    }

    pub fn laplacian_field(&self) -> Result<ScalarField> {
        let l = self.laplacian_fn()?.clone();
        Ok(ScalarField {
            name: format!("lap({})", self.name).into(),
            value: l,
            grad: None,
            laplacian: None,
            dt: None,
            vanishes_on_boundary: false,
            time_dependent: self.time_dependent,
        })
    }

    pub fn dt_field(&self) -> Result<ScalarField> {
        let d = self.dt_fn()?.clone();
        Ok(ScalarField {
            name: format!("dt({})", self.name).into(),
            value: d,
            grad: None,
            laplacian: None,
            dt: None,
            vanishes_on_boundary: false,
            time_dependent: self.time_dependent,
        })
    }

    /// The field frozen at time `t0`, viewed as a time-independent field.
    pub fn at_time(&self, t0: f64) -> ScalarField {
        let freeze_s = |f: &ScalarFn| -> ScalarFn {
            let f = f.clone();
            Arc::new(move |p: &Point| f(&Point { t: t0, x: p.x }))
        };
        let freeze_v = |f: &VectorFn| -> VectorFn {
            let f = f.clone();
            Arc::new(move |p: &Point| f(&Point { t: t0, x: p.x }))
        };
        ScalarField {
            name: format!("{}(t={t0})", self.name).into(),
            value: freeze_s(&self.value),
            grad: self.grad.as_ref().map(freeze_v),
            laplacian: self.laplacian.as_ref().map(freeze_s),
            dt: Some(Arc::new(|_| 0.0)),
            vanishes_on_boundary: self.vanishes_on_boundary,
            time_dependent: false,
        }
    }

    /// Drop the gradient (and with it the Laplacian) and the boundary flag: an `L²`-only view.
    pub fn l2_only(&self) -> ScalarField {
        ScalarField {
            name: self.name.clone(),
            value: self.value.clone(),
            grad: None,
            laplacian: None,
            dt: self.dt.clone(),
            vanishes_on_boundary: false,
            time_dependent: self.time_dependent,
        }
    }

    pub fn without_laplacian(&self) -> ScalarField {
        let mut out = self.clone();
        out.laplacian = None;
        out
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        self.combine(other, "+", |a, b| a + b, vadd)
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        self.combine(other, "-", |a, b| a - b, vsub)
    }

    fn combine(
        &self,
        other: &ScalarField,
        sym: &str,
        op: fn(f64, f64) -> f64,
        vop: fn(SpaceVec, SpaceVec) -> SpaceVec,
    ) -> ScalarField {
        let (a, b) = (self.value.clone(), other.value.clone());
        ScalarField {
            name: format!("({}{sym}{})", self.name, other.name).into(),
            value: Arc::new(move |p: &Point| op(a(p), b(p))),
            grad: combine_vector(&self.grad, &other.grad, vop),
            laplacian: combine_scalar(&self.laplacian, &other.laplacian, op),
            dt: combine_scalar(&self.dt, &other.dt, op),
            vanishes_on_boundary: self.vanishes_on_boundary && other.vanishes_on_boundary,
            time_dependent: self.time_dependent || other.time_dependent,
        }
    }

    pub fn scale(&self, c: f64) -> ScalarField {
        let a = self.value.clone();
        ScalarField {
            name: format!("{c}*{}", self.name).into(),
            value: Arc::new(move |p: &Point| c * a(p)),
            grad: scale_vector(c, &self.grad),
            laplacian: scale_scalar(c, &self.laplacian),
            dt: scale_scalar(c, &self.dt),
            vanishes_on_boundary: self.vanishes_on_boundary,
            time_dependent: self.time_dependent,
        }
    }

    /// Largest `|value|` over boundary sample points at the given time levels.
    pub fn max_boundary_value(&self, dom: &BoxDomain, times: &[f64]) -> f64 {
        dom.boundary_samples(9, times)
            .iter()
            .map(|p| self.eval(p).abs())
            .fold(0.0, f64::max)
    }

    /// Spot-check that the field is zero on `∂Ω` (at a few time levels when parabolic).
    pub fn spot_check_boundary(&self, dom: &BoxDomain, tol: f64) -> bool {
        let times = boundary_times(dom);
        self.max_boundary_value(dom, &times) <= tol
    }

    /// Enforce the advertised boundary flag against sampled boundary values.
    pub fn validate(&self, dom: &BoxDomain) -> Result<()> {
        if self.vanishes_on_boundary && !self.spot_check_boundary(dom, BOUNDARY_TOL) {
            return Err(Error::Conformity(format!(
                "field `{}` is flagged boundary-vanishing but is nonzero on the boundary",
                self.name
            )));
        }
        Ok(())
    }
}

/// Absolute tolerance for boundary spot checks.
pub const BOUNDARY_TOL: f64 = 1e-10;

pub(crate) fn boundary_times(dom: &BoxDomain) -> Vec<f64> {
    match dom.time_horizon() {
        Some(t) => vec![0.0, 0.37 * t, t],
        None => vec![0.0],
    }
}

impl VectorField {
    pub fn new(name: &str, value: impl Fn(&Point) -> SpaceVec + Send + Sync + 'static) -> Self {
        VectorField {
            name: name.into(),
            value: Arc::new(value),
            div: None,
            dt: None,
            time_dependent: false,
        }
    }

    pub fn zero() -> Self {
        VectorField::new("0", |_| [0.0; MAX_DIM])
            .with_div(|_| 0.0)
            .with_dt(|_| [0.0; MAX_DIM])
    }

    pub fn with_div(mut self, d: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        self.div = Some(Arc::new(d));
        self
    }

    pub fn with_dt(mut self, d: impl Fn(&Point) -> SpaceVec + Send + Sync + 'static) -> Self {
        self.dt = Some(Arc::new(d));
        self
    }

    pub fn time_dependent(mut self, yes: bool) -> Self {
        self.time_dependent = yes;
        self
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_time_dependent(&self) -> bool {
        self.time_dependent
    }

    pub fn conformity(&self) -> VectorConformity {
        VectorConformity {
            has_div: self.div.is_some(),
            has_dt: self.dt.is_some(),
        }
    }

    #[inline]
    pub fn eval(&self, p: &Point) -> SpaceVec {
        (self.value)(p)
    }

    pub fn value_fn(&self) -> &VectorFn {
        &self.value
    }

    pub fn div_fn(&self) -> Result<&ScalarFn> {
        self.div
            .as_ref()
            .ok_or_else(|| Error::missing(&self.name, "div"))
    }

    pub fn dt_fn(&self) -> Result<&VectorFn> {
        self.dt
            .as_ref()
            .ok_or_else(|| Error::missing(&self.name, "dt"))
    }

    pub fn div(&self, p: &Point) -> Result<f64> {
        Ok(self.div_fn()?(p))
    }

    pub fn div_field(&self) -> Result<ScalarField> {
        let d = self.div_fn()?.clone();
        Ok(ScalarField {
            name: format!("div({})", self.name).into(),
            value: d,
            grad: None,
            laplacian: None,
            dt: None,
            vanishes_on_boundary: false,
            time_dependent: self.time_dependent,
        })
    }

    pub fn dt_field(&self) -> Result<VectorField> {
        let d = self.dt_fn()?.clone();
        Ok(VectorField {
            name: format!("dt({})", self.name).into(),
            value: d,
            div: None,
            dt: None,
            time_dependent: self.time_dependent,
        })
    }

    /// Drop the divergence: an `L²`-only view.
    pub fn l2_only(&self) -> VectorField {
        let mut out = self.clone();
        out.div = None;
        out
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        self.combine(other, "+", vadd, |a, b| a + b)
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        self.combine(other, "-", vsub, |a, b| a - b)
    }

    fn combine(
        &self,
        other: &VectorField,
        sym: &str,
        vop: fn(SpaceVec, SpaceVec) -> SpaceVec,
        op: fn(f64, f64) -> f64,
    ) -> VectorField {
        let (a, b) = (self.value.clone(), other.value.clone());
        VectorField {
            name: format!("({}{sym}{})", self.name, other.name).into(),
            value: Arc::new(move |p: &Point| vop(a(p), b(p))),
            div: combine_scalar(&self.div, &other.div, op),
            dt: combine_vector(&self.dt, &other.dt, vop),
            time_dependent: self.time_dependent || other.time_dependent,
        }
    }

    pub fn scale(&self, c: f64) -> VectorField {
        let a = self.value.clone();
        VectorField {
            name: format!("{c}*{}", self.name).into(),
            value: Arc::new(move |p: &Point| vscale(c, a(p))),
            div: scale_scalar(c, &self.div),
            dt: scale_vector(c, &self.dt),
            time_dependent: self.time_dependent,
        }
    }

    /// `Σ cᵢ fᵢ` over fields sharing capabilities; the empty sum is the zero field.
    pub fn linear_combination(coeffs: &[f64], fields: &[VectorField]) -> VectorField {
        let mut acc: Option<VectorField> = None;
        for (c, f) in coeffs.iter().zip(fields) {
            let term = f.scale(*c);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term),
            });
        }
        acc.unwrap_or_else(VectorField::zero)
    }
}

/// A borrowed field of either rank.
#[derive(Debug, Clone, Copy)]
pub enum FieldRef<'a> {
    Scalar(&'a ScalarField),
    Vector(&'a VectorField),
}

impl<'a> From<&'a ScalarField> for FieldRef<'a> {
    fn from(f: &'a ScalarField) -> Self {
        FieldRef::Scalar(f)
    }
}

impl<'a> From<&'a VectorField> for FieldRef<'a> {
    fn from(f: &'a VectorField) -> Self {
        FieldRef::Vector(f)
    }
}

impl FieldRef<'_> {
    pub fn is_time_dependent(&self) -> bool {
        match self {
            FieldRef::Scalar(f) => f.is_time_dependent(),
            FieldRef::Vector(f) => f.is_time_dependent(),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            FieldRef::Scalar(f) => f.name(),
            FieldRef::Vector(f) => f.name(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine() -> ScalarField {
        ScalarField::new("sin", |p| (PI * p.x[0]).sin())
            .with_grad(|p| [PI * (PI * p.x[0]).cos(), 0.0, 0.0])
            .with_laplacian(|p| -PI * PI * (PI * p.x[0]).sin())
            .vanishing(true)
    }

    #[test]
    fn missing_capability_errors() {
        let f = ScalarField::new("bare", |_| 1.0);
        assert!(matches!(
            f.grad(&Point::space(&[0.5])),
            Err(Error::MissingCapability { capability: "grad", .. })
        ));
        assert!(f.laplacian_field().is_err());
        assert!(f.dt_field().is_err());
        let v = VectorField::new("bare", |_| [1.0, 0.0, 0.0]);
        assert!(v.div_field().is_err());
    }

    #[test]
    fn combination_keeps_shared_capabilities() {
        let a = sine();
        let b = ScalarField::new("one", |_| 1.0).with_grad(|_| [0.0; 3]);
        let c = a.sub(&b);
        let caps = c.conformity();
        assert!(caps.has_grad);
        assert!(!caps.has_laplacian);
        assert!(!caps.vanishes_on_boundary);
        let p = Point::space(&[0.25]);
        assert!((c.eval(&p) - ((PI * 0.25).sin() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn validate_catches_false_boundary_flag() {
        let dom = BoxDomain::unit(1).unwrap();
        assert!(sine().validate(&dom).is_ok());
        let liar = ScalarField::new("cos", |p| (PI * p.x[0]).cos()).vanishing(true);
        assert!(liar.validate(&dom).is_err());
    }

    #[test]
    fn gradient_field_carries_laplacian_as_div() {
        let g = sine().gradient_field().unwrap();
        let p = Point::space(&[0.3]);
        assert_eq!(g.div(&p).unwrap(), -PI * PI * (PI * 0.3).sin());
    }
}
