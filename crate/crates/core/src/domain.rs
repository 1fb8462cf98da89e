//! Axis-aligned boxes, optionally extended by a time interval into a space-time cylinder.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Point, SpaceVec};

/// Highest supported spatial dimension.
pub const MAX_DIM: usize = 3;

/// Spatial box `(lower, upper)` in `d ∈ {1, 2, 3}` dimensions, plus an optional
/// time horizon `T`. With a horizon present the domain is the cylinder `(0, T) × box`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBox", into = "RawBox")]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
    time_horizon: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    time_horizon: Option<f64>,
}

impl TryFrom<RawBox> for BoxDomain {
    type Error = Error;

    fn try_from(raw: RawBox) -> Result<Self> {
        let dom = BoxDomain::new(raw.lower, raw.upper)?;
        match raw.time_horizon {
            Some(t) => dom.with_time_horizon(t),
            None => Ok(dom),
        }
    }
}

impl From<BoxDomain> for RawBox {
    fn from(dom: BoxDomain) -> Self {
        RawBox {
            lower: dom.lower,
            upper: dom.upper,
            time_horizon: dom.time_horizon,
        }
    }
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::InvalidDomain(format!(
                "lower has {} axes but upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.is_empty() || lower.len() > MAX_DIM {
            return Err(Error::InvalidDomain(format!(
                "dimension must be 1..={MAX_DIM}, got {}",
                lower.len()
            )));
        }
        for (i, (a, b)) in lower.iter().zip(&upper).enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidDomain(format!("axis {i} is not finite")));
            }
            if b <= a {
                return Err(Error::InvalidDomain(format!(
                    "axis {i} is degenerate: upper {b} <= lower {a}"
                )));
            }
        }
        Ok(BoxDomain {
            lower,
            upper,
            time_horizon: None,
        })
    }

    /// The unit box `(0, 1)^d`.
    pub fn unit(dim: usize) -> Result<Self> {
        BoxDomain::new(vec![0.0; dim], vec![1.0; dim])
    }

    pub fn with_time_horizon(mut self, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidDomain(format!(
                "time horizon must be positive, got {t}"
            )));
        }
        self.time_horizon = Some(t);
        Ok(self)
    }

    /// The spatial box with the time horizon dropped.
    pub fn spatial(&self) -> BoxDomain {
        BoxDomain {
            lower: self.lower.clone(),
            upper: self.upper.clone(),
            time_horizon: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| b - a)
            .collect()
    }

    pub fn time_horizon(&self) -> Option<f64> {
        self.time_horizon
    }

    pub fn is_parabolic(&self) -> bool {
        self.time_horizon.is_some()
    }

    pub fn require_time_horizon(&self) -> Result<f64> {
        self.time_horizon.ok_or(Error::NotParabolic)
    }

    /// Spatial volume of the box.
    pub fn volume(&self) -> f64 {
        self.lengths().iter().product()
    }

    /// Sample points on every face of the box (and every time level in `times`).
    /// Used to spot-check boundary conditions.
    pub fn boundary_samples(&self, per_axis: usize, times: &[f64]) -> Vec<Point> {
        let d = self.dim();
        let per_axis = per_axis.max(2);
        let ticks: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                (0..per_axis)
                    .map(|k| {
                        let s = k as f64 / (per_axis - 1) as f64;
                        self.lower[i] + s * (self.upper[i] - self.lower[i])
                    })
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        for &t in times {
            for axis in 0..d {
                for &face in &[self.lower[axis], self.upper[axis]] {
                    let others: Vec<usize> = (0..d).filter(|&j| j != axis).collect();
                    let count = per_axis.pow(others.len() as u32);
                    for flat in 0..count {
                        let mut x: SpaceVec = [0.0; MAX_DIM];
                        x[axis] = face;
                        let mut rest = flat;
                        for &j in &others {
                            x[j] = ticks[j][rest % per_axis];
                            rest /= per_axis;
                        }
                        out.push(Point { t, x });
                    }
                }
            }
        }
        out
    }
}
