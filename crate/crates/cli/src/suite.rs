//! The built-in verification suite.

use funcest::manufactured::{catalog, FreeStrategy, Level, ProblemKind};
use funcest::QuadratureRule;

use crate::config::{ApproxSpec, CaseSpec, OutputSpec, RunConfig, Tolerances};
use crate::estimator::{EstimatorName as N, EstimatorSpec};

pub const EPSILONS: [f64; 3] = [0.01, 0.1, 1.0];
pub const SEEDS: u64 = 10;

pub fn case_names(kind: ProblemKind) -> Vec<String> {
    catalog(kind).into_iter().map(|c| c.name).collect()
}

/// Every catalog case of every kind, ε ∈ {0.01, 0.1, 1} with ten seeds at each level, and
/// each estimator applied to the cases and levels it is defined for.
pub fn default_config() -> RunConfig {
    let mut cases = Vec::new();
    for kind in ProblemKind::ALL {
        for (i, name) in case_names(kind).into_iter().enumerate() {
            cases.push(CaseSpec::catalog_entry(&name, kind, i));
        }
    }
    let mut approximations = Vec::new();
    for level in Level::ALL {
        for eps in EPSILONS {
            for seed in 0..SEEDS {
                approximations.push(ApproxSpec {
                    name: None,
                    level,
                    epsilon: eps,
                    seed,
                });
            }
        }
    }
    let rd = || case_names(ProblemKind::ReactionDiffusion);
    let poisson = || case_names(ProblemKind::Poisson);
    let trd = || case_names(ProblemKind::TimeReactionDiffusion);
    let heat = || case_names(ProblemKind::Heat);
    let mut parabolic = trd();
    parabolic.extend(heat());
    let mut stationary = rd();
    stationary.extend(poisson());
    let mixed = vec![Level::ConformingMixed];
    let very = vec![Level::VeryConforming];
    let e = EstimatorSpec::new;

    let mut estimators = vec![
        e(N::RdIsometry).with_cases(rd()),
        e(N::RdEquality).with_cases(rd()).with_levels(mixed.clone()),
        e(N::RdVeryConformingEquality).with_cases(rd()).with_levels(very.clone()),
    ];
    for which in ["i", "ii", "iii"] {
        estimators.push(
            e(N::RdNonconformingBounds)
                .with_cases(rd())
                .with_levels(vec![Level::NonConforming])
                .with_which(which)
                .with_free(FreeStrategy::Coarse),
        );
    }
    estimators.push(
        e(N::RdNonconformingBounds)
            .with_cases(rd())
            .with_levels(vec![Level::NonConforming])
            .with_which("iii")
            .with_free(FreeStrategy::Exact)
            .with_gamma(1e-6),
    );
    estimators.push(
        e(N::RdSemiconformingBounds)
            .with_cases(rd())
            .with_levels(vec![Level::SemiConformingPrimal])
            .with_which("i"),
    );
    estimators.push(
        e(N::RdSemiconformingBounds)
            .with_cases(rd())
            .with_levels(vec![Level::SemiConformingDual])
            .with_which("ii"),
    );
    estimators.extend([
        e(N::PoissonIsometry).with_cases(poisson()),
        e(N::PoissonTwoSided).with_cases(poisson()).with_levels(mixed.clone()),
        e(N::PoissonVeryConformingEquality).with_cases(poisson()).with_levels(very.clone()),
    ]);
    for which in ["i", "ii"] {
        estimators.push(
            e(N::PoissonNonconforming)
                .with_cases(poisson())
                .with_levels(vec![Level::NonConforming])
                .with_which(which),
        );
    }
    estimators.push(
        e(N::PoissonNonconforming)
            .with_cases(poisson())
            .with_levels(vec![Level::SemiConformingPrimal])
            .with_which("mixed_i"),
    );
    estimators.push(
        e(N::PoissonNonconforming)
            .with_cases(poisson())
            .with_levels(vec![Level::SemiConformingDual])
            .with_which("mixed_ii"),
    );
    estimators.extend([
        e(N::TrdIsometry).with_cases(trd()),
        e(N::TrdEquality).with_cases(trd()).with_levels(mixed.clone()),
        e(N::TrdVeryConformingEquality).with_cases(trd()).with_levels(very.clone()),
        e(N::HeatIsometry).with_cases(heat()),
        e(N::HeatVeryConformingEquality).with_cases(heat()).with_levels(very.clone()),
        e(N::HeatTwoSided).with_cases(heat()).with_levels(mixed.clone()),
    ]);
    for omega in [-1.0, 0.0, 0.5, 1.0, 10.0] {
        estimators.push(e(N::OmegaIdentity).with_cases(parabolic.clone()).with_omega(omega));
    }
    estimators.push(
        e(N::OptimizeMajorant)
            .with_cases(stationary)
            .with_levels(vec![Level::ConformingMixed]),
    );

    RunConfig {
        cases,
        approximations,
        estimators,
        quadrature: QuadratureRule::default(),
        tolerances: Tolerances::default(),
        output: OutputSpec::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_is_valid_and_covers_all_kinds() {
        let c = default_config();
        c.validate().unwrap();
        for kind in ProblemKind::ALL {
            assert_eq!(c.cases.iter().filter(|s| s.kind == kind).count(), 10);
        }
        assert_eq!(c.approximations.len(), Level::ALL.len() * 30);
    }

    #[test]
    fn default_suite_serializes_as_valid_config() {
        let c = default_config();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(crate::config::parse_config(&text).unwrap(), c);
    }
}
