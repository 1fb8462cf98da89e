//! Run configuration: JSON schema, strict parsing and semantic validation.

use std::collections::HashSet;
use std::path::PathBuf;

use funcest::manufactured::{catalog, make_case, FreeStrategy, Level, ProblemCase, ProblemKind};
use funcest::{BoxDomain, QuadratureRule, SeparableSum};
use serde::{Deserialize, Serialize};

use crate::estimator::{EstimatorName, EstimatorSpec};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub cases: Vec<CaseSpec>,
    #[serde(default)]
    pub approximations: Vec<ApproxSpec>,
    pub estimators: Vec<EstimatorSpec>,
    #[serde(default)]
    pub quadrature: QuadratureRule,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
}

/// A manufactured problem, either taken from the built-in catalog or given explicitly as a
/// domain plus separable solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub name: String,
    pub kind: ProblemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<BoxDomain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SeparableSum>,
    /// Multiplies the manufactured source; anything but 1 makes the data inconsistent
    /// with the exact solution on purpose.
    #[serde(default = "unit", skip_serializing_if = "is_unit")]
    pub source_scale: f64,
}

fn unit() -> f64 {
    1.0
}

fn is_unit(x: &f64) -> bool {
    *x == 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub level: Level,
    pub epsilon: f64,
    pub seed: u64,
}

impl ApproxSpec {
    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => format!("{}-eps{}-s{}", self.level.as_str(), self.epsilon, self.seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub equality_rel: f64,
    pub bound_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            equality_rel: 1e-8,
            bound_slack: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Plotdata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default = "all_formats")]
    pub formats: Vec<Format>,
}

fn all_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv, Format::Plotdata]
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: None,
            formats: all_formats(),
        }
    }
}

/// Parse and validate a JSON run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    /// Build every case. Errors name the offending entry.
    pub fn build_cases(&self) -> Result<Vec<ProblemCase>, ConfigError> {
        self.cases
            .iter()
            .enumerate()
            .map(|(i, c)| c.build().map_err(|e| invalid(format!("case #{i} `{}`: {e}", c.name))))
            .collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        QuadratureRule::new(self.quadrature.space_order, self.quadrature.time_order)
            .map_err(|e| invalid(format!("quadrature: {e}")))?;
        let t = self.tolerances;
        for (name, v) in [("equality_rel", t.equality_rel), ("bound_slack", t.bound_slack)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("tolerance {name} must be non-negative, got {v}")));
            }
        }
        let mut names = HashSet::new();
        for (i, c) in self.cases.iter().enumerate() {
            if !names.insert(c.name.as_str()) {
                return Err(invalid(format!("case #{i}: duplicate name `{}`", c.name)));
            }
        }
        self.build_cases()?;
        let mut labels = HashSet::new();
        for (i, a) in self.approximations.iter().enumerate() {
            if !(a.epsilon.is_finite() && a.epsilon >= 0.0) {
                return Err(invalid(format!(
                    "approximation #{i} `{}`: epsilon must be non-negative, got {}",
                    a.label(),
                    a.epsilon
                )));
            }
            if !labels.insert(a.label()) {
                return Err(invalid(format!("approximation #{i}: duplicate name `{}`", a.label())));
            }
        }
        for (i, e) in self.estimators.iter().enumerate() {
            let ctx = |msg: String| invalid(format!("estimator #{i} ({}): {msg}", e.name.as_str()));
            e.validate_params().map_err(ctx)?;
            if let Some(sel) = &e.cases {
                for n in sel {
                    if !names.contains(n.as_str()) {
                        return Err(ctx(format!("unknown case `{n}`")));
                    }
                }
            }
            for c in self.selected_cases(e) {
                if !e.name.kinds().contains(&c.kind) {
                    return Err(ctx(format!(
                        "cannot run on case `{}` of kind {}",
                        c.name, c.kind
                    )));
                }
            }
            if e.name.uses_approximation() {
                let approx = self.selected_approximations(e);
                if approx.is_empty() {
                    return Err(ctx("selects no approximations".into()));
                }
                for a in approx {
                    if !e.accepts_level(a.level) {
                        return Err(ctx(format!(
                            "cannot use approximation `{}` at level {}",
                            a.label(),
                            a.level.as_str()
                        )));
                    }
                }
            } else if e.levels.is_some() {
                return Err(ctx("takes no approximation, so `levels` does not apply".into()));
            }
        }
        Ok(())
    }

    pub fn selected_cases<'a>(&'a self, e: &'a EstimatorSpec) -> impl Iterator<Item = &'a CaseSpec> {
        self.cases
            .iter()
            .filter(move |c| e.cases.as_ref().is_none_or(|s| s.contains(&c.name)))
    }

    pub fn selected_approximations(&self, e: &EstimatorSpec) -> Vec<&ApproxSpec> {
        self.approximations
            .iter()
            .filter(|a| e.levels.as_ref().is_none_or(|l| l.contains(&a.level)))
            .collect()
    }

    /// Keep only the estimators accepted by `keep`.
    pub fn retain_estimators(&mut self, keep: impl Fn(EstimatorName) -> bool) {
        self.estimators.retain(|e| keep(e.name));
    }
}

impl CaseSpec {
    pub fn catalog_entry(name: &str, kind: ProblemKind, index: usize) -> Self {
        CaseSpec {
            name: name.to_string(),
            kind,
            catalog: Some(index),
            domain: None,
            solution: None,
            source_scale: 1.0,
        }
    }

    pub fn build(&self) -> funcest::Result<ProblemCase> {
        let bad = |m: String| funcest::Error::InvalidParameter(m);
        let mut case = match (&self.catalog, &self.domain, &self.solution) {
            (Some(i), None, None) => {
                let mut all = catalog(self.kind);
                if *i >= all.len() {
                    return Err(bad(format!(
                        "catalog index {i} out of range (0..{})",
                        all.len()
                    )));
                }
                all.swap_remove(*i)
            }
            (None, Some(dom), Some(sol)) => make_case(&self.name, self.kind, dom, sol)?,
            _ => {
                return Err(bad(
                    "give either `catalog` or both `domain` and `solution`".into(),
                ))
            }
        };
        case.name = self.name.clone();
        if !(self.source_scale.is_finite()) {
            return Err(bad(format!("source_scale must be finite, got {}", self.source_scale)));
        }
        if self.source_scale != 1.0 {
            case = case.with_source_scaled(self.source_scale);
        }
        Ok(case)
    }
}

/// Default free-field strategy for estimators that take one.
pub fn default_free() -> FreeStrategy {
    FreeStrategy::Coarse
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "cases": [{"name": "s", "kind": "reaction_diffusion", "catalog": 0}],
        "approximations": [{"level": "conforming_mixed", "epsilon": 0.1, "seed": 1}],
        "estimators": [{"name": "rd_equality"}]
    }"#;

    #[test]
    fn minimal_config_parses() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.cases.len(), 1);
        assert_eq!(c.quadrature, QuadratureRule::default());
        assert_eq!(c.tolerances, Tolerances::default());
        assert_eq!(c.output.formats.len(), 3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("\"seed\": 1", "\"seed\": 1, \"sede\": 2");
        assert!(matches!(parse_config(&text), Err(ConfigError::Parse { .. })));
        let text = MINIMAL.replace("rd_equality", "rd_equalty");
        assert!(matches!(parse_config(&text), Err(ConfigError::Parse { .. })));
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_config("{\n  \"cases\": [,]\n}").unwrap_err();
        match err {
            ConfigError::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn kind_mismatch_names_the_entry() {
        let text = MINIMAL.replace("reaction_diffusion", "heat");
        let msg = parse_config(&text).unwrap_err().to_string();
        assert!(msg.contains("estimator #0 (rd_equality)"), "{msg}");
        assert!(msg.contains("`s`") && msg.contains("heat"), "{msg}");
    }

    #[test]
    fn negative_gamma_is_rejected() {
        let text = MINIMAL.replace(
            r#"{"name": "rd_equality"}"#,
            r#"{"name": "rd_nonconforming_bounds", "gamma": -1}"#,
        );
        let msg = parse_config(&text).unwrap_err().to_string();
        assert!(msg.contains("gamma must be positive"), "{msg}");
    }

    #[test]
    fn level_mismatch_is_rejected() {
        let text = MINIMAL.replace("conforming_mixed", "non_conforming");
        let msg = parse_config(&text).unwrap_err().to_string();
        assert!(msg.contains("non_conforming"), "{msg}");
    }

    #[test]
    fn explicit_case_with_solution() {
        let text = r#"{
            "cases": [{"name": "x", "kind": "poisson",
                       "domain": {"lower": [0], "upper": [1]},
                       "solution": {"terms": [{"coeff": 1.0,
                           "axes": [{"type": "sin", "k": 1.0}]}]}}],
            "estimators": [{"name": "poisson_isometry"}]
        }"#;
        let c = parse_config(text).unwrap();
        let case = c.build_cases().unwrap().remove(0);
        assert_eq!(case.name, "x");
    }

    #[test]
    fn bad_catalog_index_names_case() {
        let text = MINIMAL.replace("\"catalog\": 0", "\"catalog\": 99");
        let msg = parse_config(&text).unwrap_err().to_string();
        assert!(msg.contains("case #0 `s`"), "{msg}");
    }
}
