//! Result records shared by the elliptic and parabolic estimators.

use serde::{Deserialize, Serialize};

use crate::norms::{relative_gap, total, Component, Residual, RESIDUAL_FLOOR};

/// An auxiliary identity evaluated alongside an estimator, e.g. the same quantity
/// computed once from the exact pair and once from the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: Residual,
}

impl Check {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Check {
            name: name.into(),
            residual: Residual::new(lhs, rhs),
        }
    }
}

/// Both sides of an error equality (or isometry), split into their squared-norm terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityReport {
    pub identity: String,
    pub lhs: Vec<Component>,
    pub rhs: Vec<Component>,
    pub lhs_total: f64,
    pub rhs_total: f64,
    pub rel_residual: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
}

impl EqualityReport {
    pub fn new(identity: &str, lhs: Vec<Component>, rhs: Vec<Component>) -> Self {
        let lhs_total = total(&lhs);
        let rhs_total = total(&rhs);
        EqualityReport {
            identity: identity.to_string(),
            lhs,
            rhs,
            lhs_total,
            rhs_total,
            rel_residual: relative_gap(lhs_total, rhs_total),
            checks: Vec::new(),
        }
    }

    pub fn with_check(mut self, check: Check) -> Self {
        self.checks.push(check);
        self
    }

    /// Worst relative residual over the equality and its auxiliary checks.
    pub fn worst_residual(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.residual.relative)
            .fold(self.rel_residual, f64::max)
    }
}

/// Guaranteed lower and upper bounds bracketing a computable true error.
///
/// All values are squared norms. `lower` is the largest lower candidate (0 when the
/// estimate has none) and `upper` the assembled majorant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub estimate: String,
    pub lower_bounds: Vec<Component>,
    pub lower: f64,
    pub true_error: Vec<Component>,
    pub true_total: f64,
    pub upper_components: Vec<Component>,
    pub upper: f64,
    pub gamma: Option<f64>,
    pub efficiency_upper: Option<f64>,
    pub efficiency_lower: Option<f64>,
    /// Related quantities that are not part of the bracket (unsquared forms, weaker
    /// variants of the same bound).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<Component>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
}

impl BoundReport {
    /// Upper bound is the sum of `upper_components`.
    pub fn new(
        estimate: &str,
        lower_bounds: Vec<Component>,
        true_error: Vec<Component>,
        upper_components: Vec<Component>,
        gamma: Option<f64>,
    ) -> Self {
        let upper = total(&upper_components);
        Self::with_upper(estimate, lower_bounds, true_error, upper_components, upper, gamma)
    }

    /// Upper bound given explicitly, for majorants that are not a plain sum of terms.
    pub fn with_upper(
        estimate: &str,
        lower_bounds: Vec<Component>,
        true_error: Vec<Component>,
        upper_components: Vec<Component>,
        upper: f64,
        gamma: Option<f64>,
    ) -> Self {
        let lower = lower_bounds.iter().map(|c| c.value).fold(0.0, f64::max);
        let true_total = total(&true_error);
        let mut out = BoundReport {
            estimate: estimate.to_string(),
            lower_bounds,
            lower,
            true_error,
            true_total,
            upper_components,
            upper,
            gamma,
            efficiency_upper: None,
            efficiency_lower: None,
            extra: Vec::new(),
            checks: Vec::new(),
        };
        out.refresh_efficiency();
        out
    }

    fn refresh_efficiency(&mut self) {
        if self.true_total > RESIDUAL_FLOOR {
            self.efficiency_upper = Some(self.upper / self.true_total);
            self.efficiency_lower = Some(self.lower / self.true_total);
        } else {
            self.efficiency_upper = None;
            self.efficiency_lower = None;
        }
    }

    pub fn with_extra(mut self, c: Component) -> Self {
        self.extra.push(c);
        self
    }

    pub fn with_check(mut self, check: Check) -> Self {
        self.checks.push(check);
        self
    }

    /// `lower ≤ true ≤ upper` with absolute slack, checked for every lower candidate.
    pub fn ordering_holds(&self, slack: f64) -> bool {
        self.lower_bounds
            .iter()
            .all(|c| c.value <= self.true_total + slack)
            && self.true_total <= self.upper + slack
    }

    pub fn worst_check(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.residual.relative)
            .fold(0.0, f64::max)
    }
}
