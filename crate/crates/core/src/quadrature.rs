//! Tensor Gauss–Legendre quadrature over boxes and space-time cylinders.

use serde::{Deserialize, Serialize};

use crate::domain::{BoxDomain, MAX_DIM};
use crate::error::{Error, Result};
use crate::exec;
use crate::field::Point;

/// Default node count per axis (space and time).
pub const DEFAULT_ORDER: usize = 12;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Compensated sum of a slice in index order.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut s = CompensatedSum::new();
    for &v in values {
        s.add(v);
    }
    s.value()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
///
/// Newton iteration on the three-term Legendre recurrence, started from the
/// Chebyshev-like guess `cos(π(i - 1/4)/(n + 1/2))`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Per-axis node counts for space and time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureRule {
    pub space_order: usize,
    pub time_order: usize,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule {
            space_order: DEFAULT_ORDER,
            time_order: DEFAULT_ORDER,
        }
    }
}

impl QuadratureRule {
    pub fn new(space_order: usize, time_order: usize) -> Result<Self> {
        let rule = QuadratureRule {
            space_order,
            time_order,
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn uniform(order: usize) -> Result<Self> {
        Self::new(order, order)
    }

    pub fn validate(&self) -> Result<()> {
        if self.space_order == 0 || self.time_order == 0 {
            return Err(Error::InvalidParameter(
                "quadrature orders must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Where to integrate: over the whole domain (`Ω` or `Ξ`), or over the spatial slice at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Domain,
    Slice(f64),
}

/// Physical quadrature points with their weights, in a fixed traversal order.
#[derive(Debug, Clone)]
pub struct QuadGrid {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadGrid {
    pub fn new(dom: &BoxDomain, rule: &QuadratureRule, region: Region) -> QuadGrid {
        let d = dom.dim();
        let (gn, gw) = gauss_legendre(rule.space_order);
        let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..d)
            .map(|i| {
                let (a, b) = (dom.lower()[i], dom.upper()[i]);
                map_rule(&gn, &gw, a, b)
            })
            .collect();
        let times: (Vec<f64>, Vec<f64>) = match (region, dom.time_horizon()) {
            (Region::Slice(t), _) => (vec![t], vec![1.0]),
            (Region::Domain, Some(horizon)) => {
                let (tn, tw) = gauss_legendre(rule.time_order);
                map_rule(&tn, &tw, 0.0, horizon)
            }
            (Region::Domain, None) => (vec![0.0], vec![1.0]),
        };
        let n_space = rule.space_order.pow(d as u32);
        let mut points = Vec::with_capacity(n_space * times.0.len());
        let mut weights = Vec::with_capacity(points.capacity());
        for (t, wt) in times.0.iter().zip(&times.1) {
            for flat in 0..n_space {
                let mut x = [0.0; MAX_DIM];
                let mut w = *wt;
                let mut rest = flat;
                for (i, (nodes, ws)) in axes.iter().enumerate() {
                    let k = rest % rule.space_order;
                    rest /= rule.space_order;
                    x[i] = nodes[k];
                    w *= ws[k];
                }
                points.push(Point { t: *t, x });
                weights.push(w);
            }
        }
        QuadGrid { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `Σ wᵢ f(xᵢ)`; evaluations may run in parallel, the sum is compensated and ordered.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&Point) -> f64 + Sync + Send,
    {
        let vals = exec::map_range(self.points.len(), |i| self.weights[i] * f(&self.points[i]));
        compensated_sum(&vals)
    }
}

fn map_rule(nodes: &[f64], weights: &[f64], a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        nodes.iter().map(|z| mid + half * z).collect(),
        weights.iter().map(|w| half * w).collect(),
    )
}

/// Integrate `f` over the chosen region of `dom`.
pub fn integrate<F>(dom: &BoxDomain, rule: &QuadratureRule, region: Region, f: F) -> f64
where
    F: Fn(&Point) -> f64 + Sync + Send,
{
    QuadGrid::new(dom, rule, region).integrate(f)
}
