use thiserror::Error;

/// Everything that can go wrong while building fields or evaluating estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("field `{field}` lacks the `{capability}` capability")]
    MissingCapability {
        field: String,
        capability: &'static str,
    },

    #[error("rank mismatch: cannot pair a scalar field with a vector field")]
    RankMismatch,

    #[error("space-time integrand requires a domain with a time horizon")]
    MissingTimeHorizon,

    #[error("operation requires a parabolic domain (with time horizon)")]
    NotParabolic,

    #[error("conformity violated: {0}")]
    Conformity(String),

    #[error("problem kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("flux basis is empty")]
    EmptyBasis,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn missing(field: &str, capability: &'static str) -> Self {
        Error::MissingCapability {
            field: field.to_string(),
            capability,
        }
    }
}
