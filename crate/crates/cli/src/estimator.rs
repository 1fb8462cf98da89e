//! Estimator entries of a run configuration and their dispatch onto the library.

use funcest::elliptic::{
    friedrichs_constant, poisson_isometry, poisson_nonconforming, poisson_two_sided,
    poisson_very_conforming_equality, rd_equality, rd_isometry, rd_nonconforming_bounds,
    rd_semiconforming_bounds, rd_very_conforming_equality, NcPart, PoissonNcPart, SemiPart,
};
use funcest::manufactured::{free_fields, FreeStrategy, Level, ProblemCase, ProblemKind};
use funcest::optimizer::{flux_majorant, gradient_flux, improve_bound};
use funcest::parabolic::{
    heat_isometry_check, heat_two_sided, heat_very_conforming_equality, omega_identity_check,
    trd_equality, trd_isometry_check, trd_very_conforming_equality,
};
use funcest::{ApproxPair, BoundReport, EqualityReport, QuadratureRule, VectorField};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::default_free;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorName {
    RdIsometry,
    RdEquality,
    RdVeryConformingEquality,
    RdNonconformingBounds,
    RdSemiconformingBounds,
    PoissonIsometry,
    PoissonTwoSided,
    PoissonVeryConformingEquality,
    PoissonNonconforming,
    TrdIsometry,
    TrdEquality,
    TrdVeryConformingEquality,
    HeatIsometry,
    HeatVeryConformingEquality,
    HeatTwoSided,
    OmegaIdentity,
    OptimizeMajorant,
}

/// Which subcommand an estimator belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Equality,
    Bounds,
    Majorant,
}

use EstimatorName as N;

const STATIONARY: &[ProblemKind] = &[ProblemKind::ReactionDiffusion, ProblemKind::Poisson];
const PARABOLIC: &[ProblemKind] = &[ProblemKind::TimeReactionDiffusion, ProblemKind::Heat];

impl EstimatorName {
    pub fn as_str(self) -> &'static str {
        match self {
            N::RdIsometry => "rd_isometry",
            N::RdEquality => "rd_equality",
            N::RdVeryConformingEquality => "rd_very_conforming_equality",
            N::RdNonconformingBounds => "rd_nonconforming_bounds",
            N::RdSemiconformingBounds => "rd_semiconforming_bounds",
            N::PoissonIsometry => "poisson_isometry",
            N::PoissonTwoSided => "poisson_two_sided",
            N::PoissonVeryConformingEquality => "poisson_very_conforming_equality",
            N::PoissonNonconforming => "poisson_nonconforming",
            N::TrdIsometry => "trd_isometry",
            N::TrdEquality => "trd_equality",
            N::TrdVeryConformingEquality => "trd_very_conforming_equality",
            N::HeatIsometry => "heat_isometry",
            N::HeatVeryConformingEquality => "heat_very_conforming_equality",
            N::HeatTwoSided => "heat_two_sided",
            N::OmegaIdentity => "omega_identity",
            N::OptimizeMajorant => "optimize_majorant",
        }
    }

    pub fn kinds(self) -> &'static [ProblemKind] {
        match self {
            N::RdIsometry
            | N::RdEquality
            | N::RdVeryConformingEquality
            | N::RdNonconformingBounds
            | N::RdSemiconformingBounds => &[ProblemKind::ReactionDiffusion],
            N::PoissonIsometry
            | N::PoissonTwoSided
            | N::PoissonVeryConformingEquality
            | N::PoissonNonconforming => &[ProblemKind::Poisson],
            N::TrdIsometry | N::TrdEquality | N::TrdVeryConformingEquality => {
                &[ProblemKind::TimeReactionDiffusion]
            }
            N::HeatIsometry | N::HeatVeryConformingEquality | N::HeatTwoSided => {
                &[ProblemKind::Heat]
            }
            N::OmegaIdentity => PARABOLIC,
            N::OptimizeMajorant => STATIONARY,
        }
    }

    /// Isometries and the ω-identity depend on the case alone.
    pub fn uses_approximation(self) -> bool {
        !matches!(
            self,
            N::RdIsometry | N::PoissonIsometry | N::TrdIsometry | N::HeatIsometry | N::OmegaIdentity
        )
    }

    pub fn family(self) -> Family {
        match self {
            N::RdNonconformingBounds
            | N::RdSemiconformingBounds
            | N::PoissonTwoSided
            | N::PoissonNonconforming
            | N::HeatTwoSided => Family::Bounds,
            N::OptimizeMajorant => Family::Majorant,
            _ => Family::Equality,
        }
    }

    fn params(self) -> &'static [&'static str] {
        match self {
            N::RdNonconformingBounds | N::RdSemiconformingBounds => &["gamma", "free", "which"],
            N::PoissonTwoSided | N::HeatTwoSided => &["gamma", "friedrichs"],
            N::PoissonNonconforming => &["free", "which", "friedrichs"],
            N::OmegaIdentity => &["omega"],
            N::OptimizeMajorant => &["budget", "friedrichs"],
            _ => &[],
        }
    }
}

/// One estimator entry. Parameters that do not apply to `name` are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    pub name: EstimatorName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free: Option<FreeStrategy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub which: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    /// User-supplied Friedrichs constant; the closed form for the box otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub friedrichs: Option<f64>,
    /// Restrict to these case names (all cases when absent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cases: Option<Vec<String>>,
    /// Restrict to approximations at these levels (all when absent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<Level>>,
}

const DEFAULT_BUDGET: usize = 4;
// Higher modes are no longer resolved by the default quadrature.
const MAX_BUDGET: usize = 32;
const MAX_BASIS_INDEX: usize = 32;
const DEFAULT_NC_GAMMA: f64 = 1.0;

fn parse_part<T: DeserializeOwned>(which: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(which.to_string()))
        .map_err(|_| format!("unknown part `{which}`"))
}

impl EstimatorSpec {
    pub fn new(name: EstimatorName) -> Self {
        EstimatorSpec {
            name,
            gamma: None,
            free: None,
            which: None,
            omega: None,
            budget: None,
            friedrichs: None,
            cases: None,
            levels: None,
        }
    }

    pub fn with_gamma(mut self, g: f64) -> Self {
        self.gamma = Some(g);
        self
    }

    pub fn with_free(mut self, f: FreeStrategy) -> Self {
        self.free = Some(f);
        self
    }

    pub fn with_which(mut self, w: &str) -> Self {
        self.which = Some(w.to_string());
        self
    }

    pub fn with_omega(mut self, w: f64) -> Self {
        self.omega = Some(w);
        self
    }

    pub fn with_cases(mut self, cases: Vec<String>) -> Self {
        self.cases = Some(cases);
        self
    }

    pub fn with_levels(mut self, levels: Vec<Level>) -> Self {
        self.levels = Some(levels);
        self
    }

    fn given(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.gamma.is_some() {
            out.push("gamma");
        }
        if self.free.is_some() {
            out.push("free");
        }
        if self.which.is_some() {
            out.push("which");
        }
        if self.omega.is_some() {
            out.push("omega");
        }
        if self.budget.is_some() {
            out.push("budget");
        }
        if self.friedrichs.is_some() {
            out.push("friedrichs");
        }
        out
    }

    pub fn validate_params(&self) -> Result<(), String> {
        let allowed = self.name.params();
        for p in self.given() {
            if !allowed.contains(&p) {
                return Err(format!("parameter `{p}` does not apply"));
            }
        }
        if let Some(g) = self.gamma {
            if !(g.is_finite() && g > 0.0) {
                return Err(format!("gamma must be positive, got {g}"));
            }
            if matches!(self.name, N::PoissonTwoSided | N::HeatTwoSided) && g <= 1.0 {
                return Err(format!("gamma must exceed 1 for the mixed majorant, got {g}"));
            }
        }
        if let Some(c) = self.friedrichs {
            if !(c.is_finite() && c > 0.0) {
                return Err(format!("friedrichs constant must be positive, got {c}"));
            }
        }
        if let Some(w) = self.omega {
            if !w.is_finite() {
                return Err(format!("omega must be finite, got {w}"));
            }
        }
        if self.name == N::OmegaIdentity && self.omega.is_none() {
            return Err("parameter `omega` is required".into());
        }
        if let Some(b) = self.budget {
            if !(1..=MAX_BUDGET).contains(&b) {
                return Err(format!("budget must be between 1 and {MAX_BUDGET}, got {b}"));
            }
        }
        if let Some(FreeStrategy::Basis(k)) = self.free {
            if k > MAX_BASIS_INDEX {
                return Err(format!("free-field basis index must be at most {MAX_BASIS_INDEX}, got {k}"));
            }
        }
        match self.name {
            N::RdNonconformingBounds => {
                self.part::<NcPart>(NcPart::I)?;
            }
            N::RdSemiconformingBounds => {
                self.part::<SemiPart>(SemiPart::I)?;
            }
            N::PoissonNonconforming => {
                self.part::<PoissonNcPart>(PoissonNcPart::I)?;
            }
            _ => {}
        }
        Ok(())
    }

    fn part<T: DeserializeOwned>(&self, default: T) -> Result<T, String> {
        match &self.which {
            Some(w) => parse_part(w),
            None => Ok(default),
        }
    }

    /// Whether an approximation at `level` meets this estimator's conformity contract.
    pub fn accepts_level(&self, level: Level) -> bool {
        let conforming = level.primal_conforming() && level.dual_conforming();
        match self.name {
            N::RdEquality | N::TrdEquality | N::PoissonTwoSided | N::HeatTwoSided => conforming,
            N::RdVeryConformingEquality
            | N::PoissonVeryConformingEquality
            | N::TrdVeryConformingEquality
            | N::HeatVeryConformingEquality => level == Level::VeryConforming,
            N::RdNonconformingBounds => true,
            N::RdSemiconformingBounds => match self.part(SemiPart::I) {
                Ok(SemiPart::I) => level.primal_conforming(),
                Ok(SemiPart::Ii) => level.dual_conforming(),
                Err(_) => false,
            },
            N::PoissonNonconforming => match self.part(PoissonNcPart::I) {
                Ok(PoissonNcPart::MixedI) => level.primal_conforming(),
                Ok(PoissonNcPart::MixedIi) => level.dual_conforming(),
                Ok(_) => true,
                Err(_) => false,
            },
            N::OptimizeMajorant => level.primal_conforming(),
            N::RdIsometry
            | N::PoissonIsometry
            | N::TrdIsometry
            | N::HeatIsometry
            | N::OmegaIdentity => true,
        }
    }

    /// Name plus the parameters that were given, e.g. `rd_nonconforming_bounds[gamma=1,which=iii]`.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if let Some(g) = self.gamma {
            parts.push(format!("gamma={g}"));
        }
        if let Some(f) = self.free {
            let f = match f {
                FreeStrategy::Exact => "exact".to_string(),
                FreeStrategy::Coarse => "coarse".to_string(),
                FreeStrategy::Basis(k) => format!("basis{k}"),
            };
            parts.push(format!("free={f}"));
        }
        if let Some(w) = &self.which {
            parts.push(format!("which={w}"));
        }
        if let Some(w) = self.omega {
            parts.push(format!("omega={w}"));
        }
        if let Some(b) = self.budget {
            parts.push(format!("budget={b}"));
        }
        if let Some(c) = self.friedrichs {
            parts.push(format!("friedrichs={c}"));
        }
        if parts.is_empty() {
            self.name.as_str().to_string()
        } else {
            format!("{}[{}]", self.name.as_str(), parts.join(","))
        }
    }

    fn cf(&self, case: &ProblemCase) -> f64 {
        self.friedrichs
            .unwrap_or_else(|| friedrichs_constant(&case.dom).value)
    }

    /// Evaluate on one case (and approximation, for estimators that take one).
    pub fn execute(
        &self,
        case: &ProblemCase,
        approx: Option<&ApproxPair>,
        q: &QuadratureRule,
    ) -> Result<Outcome, String> {
        let need = || approx.ok_or_else(|| "estimator needs an approximation".to_string());
        let free = || free_fields(case, self.free.unwrap_or_else(default_free));
        let gamma_nc = self.gamma.unwrap_or(DEFAULT_NC_GAMMA);
        let eq = |r: funcest::Result<EqualityReport>| r.map(Outcome::equality);
        let bd = |r: funcest::Result<BoundReport>| r.map(Outcome::bound);
        let out = match self.name {
            N::RdIsometry => eq(rd_isometry(case, q)),
            N::PoissonIsometry => eq(poisson_isometry(case, q)),
            N::TrdIsometry => eq(trd_isometry_check(case, q)),
            N::HeatIsometry => eq(heat_isometry_check(case, q)),
            N::OmegaIdentity => eq(omega_identity_check(
                &case.exact_u,
                self.omega.unwrap_or(1.0),
                &case.dom,
                q,
            )),
            N::RdEquality => eq(rd_equality(case, need()?, q)),
            N::TrdEquality => eq(trd_equality(case, need()?, q)),
            N::RdVeryConformingEquality => {
                eq(rd_very_conforming_equality(case, &need()?.u_tilde, q))
            }
            N::PoissonVeryConformingEquality => {
                eq(poisson_very_conforming_equality(case, &need()?.u_tilde, q))
            }
            N::TrdVeryConformingEquality => {
                eq(trd_very_conforming_equality(case, &need()?.u_tilde, q))
            }
            N::HeatVeryConformingEquality => {
                eq(heat_very_conforming_equality(case, &need()?.u_tilde, q))
            }
            N::RdNonconformingBounds => {
                let (which, a) = (self.part(NcPart::I)?, need()?);
                free().and_then(|(phi, flux)| {
                    bd(rd_nonconforming_bounds(case, a, &phi, &flux, gamma_nc, which, q))
                })
            }
            N::RdSemiconformingBounds => {
                let (part, a) = (self.part(SemiPart::I)?, need()?);
                free().and_then(|(phi, flux)| {
                    bd(rd_semiconforming_bounds(case, a, &phi, &flux, gamma_nc, part, q))
                })
            }
            N::PoissonNonconforming => {
                let (which, a) = (self.part(PoissonNcPart::I)?, need()?);
                let cf = self.cf(case);
                free().and_then(|(phi, flux)| {
                    bd(poisson_nonconforming(case, a, &phi, &flux, cf, which, q))
                })
            }
            N::PoissonTwoSided => bd(poisson_two_sided(case, need()?, self.cf(case), self.gamma, q)),
            N::HeatTwoSided => bd(heat_two_sided(case, need()?, self.cf(case), self.gamma, q)),
            N::OptimizeMajorant => self.optimize(case, &need()?.u_tilde, q),
        };
        out.map_err(|e| e.to_string())
    }

    fn optimize(
        &self,
        case: &ProblemCase,
        u_tilde: &funcest::ScalarField,
        q: &QuadratureRule,
    ) -> funcest::Result<Outcome> {
        let cf = self.cf(case);
        let start = flux_majorant(case, u_tilde, &VectorField::zero(), cf, q)?;
        let dom = case.dom.clone();
        let budget = self.budget.unwrap_or(DEFAULT_BUDGET);
        let steps = improve_bound(case, u_tilde, &start, |k| gradient_flux(&dom, k), budget, cf, q)?;
        let mut history = vec![start.report.upper];
        history.extend(steps.iter().map(|s| s.report.upper));
        let report = steps.last().map_or(start.report, |s| s.report.clone());
        Ok(Outcome::Majorant { report, history })
    }
}

/// Result of one record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Equality { report: EqualityReport },
    Bound { report: BoundReport },
    /// Final bound after enrichment, with the upper bound after each step (the first
    /// entry is the starting flux).
    Majorant { report: BoundReport, history: Vec<f64> },
    Error { message: String },
}

impl Outcome {
    fn equality(report: EqualityReport) -> Self {
        Outcome::Equality { report }
    }

    fn bound(report: BoundReport) -> Self {
        Outcome::Bound { report }
    }

    pub fn bound_report(&self) -> Option<&BoundReport> {
        match self {
            Outcome::Bound { report } | Outcome::Majorant { report, .. } => Some(report),
            _ => None,
        }
    }
}
