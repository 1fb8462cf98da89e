//! Execute a validated configuration into an order-stable report.

use std::time::{Duration, Instant};

use funcest::exec;
use funcest::manufactured::{perturb, Level, ProblemCase, ProblemKind};
use funcest::{BoundReport, EqualityReport, QuadratureRule};
use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, RunConfig, Tolerances};
use crate::estimator::{EstimatorName, Outcome};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxInfo {
    pub name: String,
    pub level: Level,
    pub epsilon: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub index: usize,
    pub case: String,
    pub kind: ProblemKind,
    pub approximation: Option<ApproxInfo>,
    pub estimator: EstimatorName,
    pub label: String,
    pub outcome: Outcome,
    /// Equality residuals within `equality_rel` and bounds ordered within `bound_slack`.
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub records: usize,
    pub passed: usize,
    pub violations: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub quadrature: QuadratureRule,
    pub tolerances: Tolerances,
    pub summary: Summary,
    pub records: Vec<Record>,
}

/// Exit status: 0 when everything passed, 1 when an equality or ordering is violated,
/// 3 when records failed to evaluate (and nothing was violated).
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_RECORD_ERROR: i32 = 3;

impl RunReport {
    pub fn empty(quadrature: QuadratureRule, tolerances: Tolerances) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            quadrature,
            tolerances,
            summary: Summary {
                records: 0,
                passed: 0,
                violations: 0,
                errors: 0,
            },
            records: Vec::new(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.summary.violations > 0 {
            EXIT_VIOLATION
        } else if self.summary.errors > 0 {
            EXIT_RECORD_ERROR
        } else {
            0
        }
    }
}

/// Wall time per record, kept out of the report so that reports stay byte-stable.
#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub records: Vec<f64>,
}

pub struct RunOutput {
    pub report: RunReport,
    pub timings: Timings,
}

fn all_finite_eq(r: &EqualityReport) -> bool {
    r.lhs.iter().chain(&r.rhs).all(|c| c.value.is_finite())
        && r.rel_residual.is_finite()
        && r.checks.iter().all(|c| c.residual.relative.is_finite())
}

fn all_finite_bound(r: &BoundReport) -> bool {
    r.lower_bounds
        .iter()
        .chain(&r.true_error)
        .chain(&r.upper_components)
        .chain(&r.extra)
        .all(|c| c.value.is_finite())
        && r.upper.is_finite()
        && r.gamma.is_none_or(f64::is_finite)
        && r.efficiency_upper.is_none_or(f64::is_finite)
        && r.efficiency_lower.is_none_or(f64::is_finite)
        && r.checks.iter().all(|c| c.residual.relative.is_finite())
}

/// Turn non-finite results into errors (JSON has no NaN) and collect violations.
fn judge(outcome: Outcome, tol: &Tolerances) -> (Outcome, Vec<String>) {
    let mut v = Vec::new();
    let outcome = match outcome {
        Outcome::Equality { report } if !all_finite_eq(&report) => Outcome::Error {
            message: "non-finite value in equality report".into(),
        },
        Outcome::Bound { report } | Outcome::Majorant { report, .. }
            if !all_finite_bound(&report) =>
        {
            Outcome::Error {
                message: "non-finite value in bound report".into(),
            }
        }
        other => other,
    };
    match &outcome {
        Outcome::Equality { report } => {
            if report.rel_residual > tol.equality_rel {
                v.push(format!("relative residual {:e}", report.rel_residual));
            }
            for c in &report.checks {
                if c.residual.relative > tol.equality_rel {
                    v.push(format!("check `{}` residual {:e}", c.name, c.residual.relative));
                }
            }
        }
        Outcome::Bound { report } | Outcome::Majorant { report, .. } => {
            for c in &report.lower_bounds {
                if c.value > report.true_total + tol.bound_slack {
                    v.push(format!("lower `{}` exceeds true error", c.name));
                }
            }
            if report.true_total > report.upper + tol.bound_slack {
                v.push("true error exceeds upper bound".into());
            }
            for c in &report.checks {
                if c.residual.relative > tol.equality_rel {
                    v.push(format!("check `{}` residual {:e}", c.name, c.residual.relative));
                }
            }
            if let Outcome::Majorant { history, .. } = &outcome {
                if history.windows(2).any(|w| w[1] > w[0] * (1.0 + tol.equality_rel)) {
                    v.push("upper bound increased under enrichment".into());
                }
            }
        }
        Outcome::Error { .. } => {}
    }
    (outcome, v)
}

struct Job {
    case: usize,
    approx: Option<usize>,
}

/// Run every (case × approximation × estimator) combination selected by the config.
///
/// Jobs are (case, approximation) pairs and run in parallel; records come out grouped by
/// case in declaration order, the approximation-free estimators first, then each
/// approximation with its estimators in declaration order.
pub fn run(config: &RunConfig) -> Result<RunOutput, ConfigError> {
    config.validate()?;
    run_unchecked(config)
}

/// Same as [`run`] without the compatibility checks; mismatches surface as per-record
/// errors.
pub fn run_unchecked(config: &RunConfig) -> Result<RunOutput, ConfigError> {
    let cases = config.build_cases()?;
    let q = config.quadrature;
    let tol = config.tolerances;
    let started = Instant::now();

    let mut jobs = Vec::new();
    for (ci, spec) in config.cases.iter().enumerate() {
        let selects = |e: &crate::estimator::EstimatorSpec| {
            e.cases.as_ref().is_none_or(|s| s.contains(&spec.name))
        };
        if config
            .estimators
            .iter()
            .any(|e| selects(e) && !e.name.uses_approximation())
        {
            jobs.push(Job { case: ci, approx: None });
        }
        for (ai, a) in config.approximations.iter().enumerate() {
            let used = config.estimators.iter().any(|e| {
                selects(e)
                    && e.name.uses_approximation()
                    && e.levels.as_ref().is_none_or(|l| l.contains(&a.level))
            });
            if used {
                jobs.push(Job { case: ci, approx: Some(ai) });
            }
        }
    }

    let results: Vec<Vec<(Record, Duration)>> =
        exec::map_collect(&jobs, |job| run_job(config, &cases, job, &q, &tol));

    let mut records = Vec::new();
    let mut times = Vec::new();
    for (mut r, t) in results.into_iter().flatten() {
        r.index = records.len();
        records.push(r);
        times.push(t.as_secs_f64());
    }
    let summary = Summary {
        records: records.len(),
        passed: records.iter().filter(|r| r.passed).count(),
        violations: records.iter().filter(|r| !r.violations.is_empty()).count(),
        errors: records
            .iter()
            .filter(|r| matches!(r.outcome, Outcome::Error { .. }))
            .count(),
    };
    Ok(RunOutput {
        report: RunReport {
            schema_version: SCHEMA_VERSION,
            quadrature: q,
            tolerances: tol,
            summary,
            records,
        },
        timings: Timings {
            total_seconds: started.elapsed().as_secs_f64(),
            records: times,
        },
    })
}

fn run_job(
    config: &RunConfig,
    cases: &[ProblemCase],
    job: &Job,
    q: &QuadratureRule,
    tol: &Tolerances,
) -> Vec<(Record, Duration)> {
    let spec = &config.cases[job.case];
    let case = &cases[job.case];
    let approx_spec = job.approx.map(|i| &config.approximations[i]);
    let info = approx_spec.map(|a| ApproxInfo {
        name: a.label(),
        level: a.level,
        epsilon: a.epsilon,
        seed: a.seed,
    });
    let pair = approx_spec.map(|a| perturb(case, a.level, a.epsilon, a.seed));
    let mut out = Vec::new();
    for e in &config.estimators {
        if !e.cases.as_ref().is_none_or(|s| s.contains(&spec.name)) {
            continue;
        }
        match approx_spec {
            None if e.name.uses_approximation() => continue,
            Some(_) if !e.name.uses_approximation() => continue,
            Some(a) if !e.levels.as_ref().is_none_or(|l| l.contains(&a.level)) => continue,
            _ => {}
        }
        let t0 = Instant::now();
        let outcome = match &pair {
            Some(Err(err)) => Err(format!("perturbation failed: {err}")),
            Some(Ok(p)) => e.execute(case, Some(p), q),
            None => e.execute(case, None, q),
        };
        let outcome = outcome.unwrap_or_else(|message| Outcome::Error { message });
        let (outcome, violations) = judge(outcome, tol);
        let passed = violations.is_empty() && !matches!(outcome, Outcome::Error { .. });
        out.push((
            Record {
                index: 0,
                case: spec.name.clone(),
                kind: case.kind,
                approximation: info.clone(),
                estimator: e.name,
                label: e.label(),
                outcome,
                passed,
                violations,
            },
            t0.elapsed(),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn config(eps: f64) -> RunConfig {
        parse_config(&format!(
            r#"{{
            "cases": [{{"name": "a", "kind": "reaction_diffusion", "catalog": 6}},
                      {{"name": "b", "kind": "heat", "catalog": 0}}],
            "approximations": [{{"level": "conforming_mixed", "epsilon": {eps}, "seed": 3}}],
            "estimators": [{{"name": "rd_equality", "cases": ["a"]}},
                           {{"name": "rd_isometry", "cases": ["a"]}},
                           {{"name": "heat_two_sided", "cases": ["b"]}}]
        }}"#
        ))
        .unwrap()
    }

    #[test]
    fn zero_perturbation_gives_zero_residuals() {
        let out = run(&config(0.0)).unwrap();
        let r = &out.report;
        assert_eq!(r.summary.records, 3);
        assert_eq!(r.exit_code(), 0);
        for rec in &r.records {
            match &rec.outcome {
                Outcome::Equality { report } if rec.approximation.is_some() => {
                    // The source is built symbolically, so the data side only vanishes
                    // up to round-off.
                    assert_eq!(report.lhs_total, 0.0);
                    assert!(report.rhs_total < 1e-30);
                    assert!(report.worst_residual() < 1e-15);
                }
                Outcome::Bound { report } => assert_eq!(report.true_total, 0.0),
                _ => {}
            }
        }
    }

    #[test]
    fn record_order_follows_declaration() {
        let out = run(&config(0.1)).unwrap();
        let labels: Vec<_> = out
            .report
            .records
            .iter()
            .map(|r| (r.case.as_str(), r.estimator.as_str()))
            .collect();
        assert_eq!(
            labels,
            vec![("a", "rd_isometry"), ("a", "rd_equality"), ("b", "heat_two_sided")]
        );
        assert!(out.report.records.iter().enumerate().all(|(i, r)| r.index == i));
        assert_eq!(out.timings.records.len(), 3);
    }

    #[test]
    fn corrupted_source_is_a_violation() {
        let mut c = config(0.1);
        c.cases[0].source_scale = 1.01;
        let out = run(&c).unwrap();
        assert_eq!(out.report.exit_code(), EXIT_VIOLATION);
        assert!(!out.report.records[0].violations.is_empty());
    }

    #[test]
    fn record_errors_do_not_abort() {
        let mut c = config(0.1);
        // Mixed approximations carry no Laplacian, so this fails at evaluation time.
        c.estimators.insert(
            0,
            crate::estimator::EstimatorSpec::new(EstimatorName::RdVeryConformingEquality)
                .with_cases(vec!["a".into()]),
        );
        assert!(c.validate().is_err());
        let out = run_unchecked(&c).unwrap();
        assert_eq!(out.report.summary.records, 4);
        assert_eq!(out.report.summary.errors, 1);
        assert!(matches!(out.report.records[1].outcome, Outcome::Error { .. }));
        assert!(out.report.records[2].passed);
        assert_eq!(out.report.exit_code(), EXIT_RECORD_ERROR);
    }
}
