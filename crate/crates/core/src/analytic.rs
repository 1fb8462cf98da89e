//! Closed-form separable expressions: sums of products of one-dimensional factors.
//!
//! A term is `c · g(t) · Π_i h_i(x_i)` where every factor is a sine, cosine,
//! exponential or polynomial. The family is closed under differentiation, so a
//! [`SeparableSum`] yields fields with exact gradients, Laplacians and time derivatives.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{BoxDomain, MAX_DIM};
use crate::error::{Error, Result};
use crate::field::{Point, ScalarField, SpaceVec, VectorField, BOUNDARY_TOL};
use crate::quadrature::gauss_legendre;

/// One-dimensional factor in a variable `s` (a spatial coordinate or time).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Factor {
    /// `sin(kπ(s - shift))`
    Sin {
        k: f64,
        #[serde(default)]
        shift: f64,
    },
    /// `cos(kπ(s - shift))`
    Cos {
        k: f64,
        #[serde(default)]
        shift: f64,
    },
    /// `exp(rate · s)`
    Exp { rate: f64 },
    /// `Σ coeffs[j] s^j`
    Poly { coeffs: Vec<f64> },
}

impl Factor {
    pub fn one() -> Factor {
        Factor::Poly { coeffs: vec![1.0] }
    }

    /// `sin(kπ(s - a)/L)` on the interval `(a, a + L)`.
    pub fn sine_mode(k: f64, a: f64, len: f64) -> Factor {
        Factor::Sin {
            k: k / len,
            shift: a,
        }
    }

    pub fn cosine_mode(k: f64, a: f64, len: f64) -> Factor {
        Factor::Cos {
            k: k / len,
            shift: a,
        }
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Factor::Sin { k, shift } => (k * PI * (s - shift)).sin(),
            Factor::Cos { k, shift } => (k * PI * (s - shift)).cos(),
            Factor::Exp { rate } => (rate * s).exp(),
            Factor::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c),
        }
    }

    /// `(λ, f')` with `d/ds self = λ · f'`.
    pub fn derivative(&self) -> (f64, Factor) {
        match self {
            Factor::Sin { k, shift } => (
                k * PI,
                Factor::Cos {
                    k: *k,
                    shift: *shift,
                },
            ),
            Factor::Cos { k, shift } => (
                -k * PI,
                Factor::Sin {
                    k: *k,
                    shift: *shift,
                },
            ),
            Factor::Exp { rate } => (*rate, Factor::Exp { rate: *rate }),
            Factor::Poly { coeffs } => {
                let d: Vec<f64> = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(j, c)| j as f64 * c)
                    .collect();
                if d.is_empty() {
                    (0.0, Factor::Poly { coeffs: vec![0.0] })
                } else {
                    (1.0, Factor::Poly { coeffs: d })
                }
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Factor::Poly { coeffs } => coeffs.iter().skip(1).all(|c| *c == 0.0),
            Factor::Sin { k, .. } | Factor::Cos { k, .. } => *k == 0.0,
            Factor::Exp { rate } => *rate == 0.0,
        }
    }
}

/// `coeff · time(t) · Π axes[i](x_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coeff: f64,
    #[serde(default = "Factor::one")]
    pub time: Factor,
    pub axes: Vec<Factor>,
}

impl Term {
    pub fn new(coeff: f64, axes: Vec<Factor>) -> Self {
        Term {
            coeff,
            time: Factor::one(),
            axes,
        }
    }

    pub fn with_time(mut self, time: Factor) -> Self {
        self.time = time;
        self
    }

    #[inline]
    pub fn eval(&self, t: f64, x: &SpaceVec) -> f64 {
        let mut v = self.coeff * self.time.eval(t);
        for (i, f) in self.axes.iter().enumerate() {
            v *= f.eval(x[i]);
        }
        v
    }

    fn partial(&self, axis: usize) -> Term {
        let (lam, f) = self.axes[axis].derivative();
        let mut out = self.clone();
        out.coeff *= lam;
        out.axes[axis] = f;
        out
    }

    fn dt(&self) -> Term {
        let (lam, f) = self.time.derivative();
        let mut out = self.clone();
        out.coeff *= lam;
        out.time = f;
        out
    }
}

/// Finite sum of separable terms over a fixed spatial dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparableSum {
    pub terms: Vec<Term>,
}

impl SeparableSum {
    pub fn new(terms: Vec<Term>) -> Self {
        SeparableSum { terms }
    }

    pub fn zero() -> Self {
        SeparableSum { terms: Vec::new() }
    }

    /// `Π sin(k_i π (x_i - a_i)/L_i)` on `dom`, times `time`.
    pub fn sine_product(dom: &BoxDomain, modes: &[f64], coeff: f64, time: Factor) -> Self {
        let axes = (0..dom.dim())
            .map(|i| Factor::sine_mode(modes[i], dom.lower()[i], dom.lengths()[i]))
            .collect();
        SeparableSum::new(vec![Term::new(coeff, axes).with_time(time)])
    }

    /// Spatial dimension shared by all terms (`None` for the empty sum).
    pub fn dim(&self) -> Option<usize> {
        self.terms.first().map(|t| t.axes.len())
    }

    pub fn validate_dim(&self, d: usize) -> Result<()> {
        if self.terms.iter().any(|t| t.axes.len() != d) {
            return Err(Error::InvalidParameter(format!(
                "every term must have exactly {d} axis factors"
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, t: f64, x: &SpaceVec) -> f64 {
        self.terms.iter().map(|term| term.eval(t, x)).sum()
    }

    pub fn partial(&self, axis: usize) -> SeparableSum {
        SeparableSum::new(self.terms.iter().map(|t| t.partial(axis)).collect()).pruned()
    }

    pub fn dt(&self) -> SeparableSum {
        SeparableSum::new(self.terms.iter().map(Term::dt).collect()).pruned()
    }

    pub fn laplacian(&self, d: usize) -> SeparableSum {
        let mut out = SeparableSum::zero();
        for i in 0..d {
            out = out.add(&self.partial(i).partial(i));
        }
        out
    }

    pub fn add(&self, other: &SeparableSum) -> SeparableSum {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        SeparableSum::new(terms)
    }

    pub fn scale(&self, c: f64) -> SeparableSum {
        SeparableSum::new(
            self.terms
                .iter()
                .map(|t| {
                    let mut t = t.clone();
                    t.coeff *= c;
                    t
                })
                .collect(),
        )
        .pruned()
    }

    /// Freeze the time factor at `t0`.
    pub fn at_time(&self, t0: f64) -> SeparableSum {
        SeparableSum::new(
            self.terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff * t.time.eval(t0),
                    time: Factor::one(),
                    axes: t.axes.clone(),
                })
                .collect(),
        )
        .pruned()
    }

    pub fn is_time_dependent(&self) -> bool {
        self.terms.iter().any(|t| !t.time.is_constant())
    }

    fn pruned(mut self) -> SeparableSum {
        self.terms.retain(|t| t.coeff != 0.0);
        self
    }

    /// Exact-to-rounding `L²` inner product over `dom` (space-time when parabolic),
    /// computed factor by factor with one-dimensional Gauss rules.
    pub fn l2_inner(&self, other: &SeparableSum, dom: &BoxDomain) -> f64 {
        let (nodes, weights) = gauss_legendre(48);
        let integrate_1d = |f: &Factor, g: &Factor, a: f64, b: f64| -> f64 {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            nodes
                .iter()
                .zip(&weights)
                .map(|(z, w)| {
                    let s = mid + half * z;
                    half * w * f.eval(s) * g.eval(s)
                })
                .sum()
        };
        let mut total = 0.0;
        for a in &self.terms {
            for b in &other.terms {
                let mut v = a.coeff * b.coeff;
                if let Some(horizon) = dom.time_horizon() {
                    v *= integrate_1d(&a.time, &b.time, 0.0, horizon);
                } else {
                    v *= a.time.eval(0.0) * b.time.eval(0.0);
                }
                for i in 0..dom.dim() {
                    v *= integrate_1d(&a.axes[i], &b.axes[i], dom.lower()[i], dom.upper()[i]);
                }
                total += v;
            }
        }
        total
    }

    pub fn l2_norm_sq(&self, dom: &BoxDomain) -> f64 {
        self.l2_inner(self, dom)
    }

    /// Largest `|value|` over sampled boundary points.
    pub fn max_boundary_value(&self, dom: &BoxDomain) -> f64 {
        let times = crate::field::boundary_times(dom);
        dom.boundary_samples(9, &times)
            .iter()
            .map(|p| self.eval(p.t, &p.x).abs())
            .fold(0.0, f64::max)
    }

    /// Build a field with value, gradient, Laplacian and time derivative. The boundary
    /// flag is set when sampled boundary values vanish on `dom`.
    pub fn to_field(&self, name: &str, dom: &BoxDomain) -> Result<ScalarField> {
        let d = dom.dim();
        self.validate_dim(d)?;
        let value = Arc::new(self.clone());
        let grads: Arc<Vec<SeparableSum>> = Arc::new((0..d).map(|i| self.partial(i)).collect());
        let lap = Arc::new(self.laplacian(d));
        let dt = Arc::new(self.dt());
        let vanishes = self.max_boundary_value(dom) <= BOUNDARY_TOL;
        Ok(ScalarField::new(name, move |p: &Point| value.eval(p.t, &p.x))
            .with_grad(move |p: &Point| {
                let mut g = [0.0; MAX_DIM];
                for (i, gi) in grads.iter().enumerate() {
                    g[i] = gi.eval(p.t, &p.x);
                }
                g
            })
            .with_laplacian(move |p: &Point| lap.eval(p.t, &p.x))
            .with_dt(move |p: &Point| dt.eval(p.t, &p.x))
            .vanishing(vanishes)
            .time_dependent(self.is_time_dependent()))
    }
}

/// Vector field with separable components; its divergence is exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorSpec {
    pub components: Vec<SeparableSum>,
}

impl VectorSpec {
    /// `∇s`.
    pub fn gradient(s: &SeparableSum, d: usize) -> VectorSpec {
        VectorSpec {
            components: (0..d).map(|i| s.partial(i)).collect(),
        }
    }

    /// `(-∂₂s, ∂₁s)` in two dimensions; divergence free.
    pub fn rotated_gradient(s: &SeparableSum) -> VectorSpec {
        VectorSpec {
            components: vec![s.partial(1).scale(-1.0), s.partial(0)],
        }
    }

    pub fn add(&self, other: &VectorSpec) -> VectorSpec {
        VectorSpec {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> VectorSpec {
        VectorSpec {
            components: self.components.iter().map(|s| s.scale(c)).collect(),
        }
    }

    pub fn divergence(&self) -> SeparableSum {
        let mut out = SeparableSum::zero();
        for (i, c) in self.components.iter().enumerate() {
            out = out.add(&c.partial(i));
        }
        out
    }

    pub fn l2_norm_sq(&self, dom: &BoxDomain) -> f64 {
        self.components.iter().map(|c| c.l2_norm_sq(dom)).sum()
    }

    pub fn is_time_dependent(&self) -> bool {
        self.components.iter().any(SeparableSum::is_time_dependent)
    }

    pub fn to_field(&self, name: &str, dom: &BoxDomain) -> Result<VectorField> {
        let d = dom.dim();
        if self.components.len() != d {
            return Err(Error::InvalidParameter(format!(
                "vector field needs {d} components, got {}",
                self.components.len()
            )));
        }
        for c in &self.components {
            c.validate_dim(d)?;
        }
        let comps = Arc::new(self.components.clone());
        let dts: Arc<Vec<SeparableSum>> = Arc::new(self.components.iter().map(|c| c.dt()).collect());
        let div = Arc::new(self.divergence());
        Ok(VectorField::new(name, move |p: &Point| {
            let mut v = [0.0; MAX_DIM];
            for (i, c) in comps.iter().enumerate() {
                v[i] = c.eval(p.t, &p.x);
            }
            v
        })
        .with_div(move |p: &Point| div.eval(p.t, &p.x))
        .with_dt(move |p: &Point| {
            let mut v = [0.0; MAX_DIM];
            for (i, c) in dts.iter().enumerate() {
                v[i] = c.eval(p.t, &p.x);
            }
            v
        })
        .time_dependent(self.is_time_dependent()))
    }
}
