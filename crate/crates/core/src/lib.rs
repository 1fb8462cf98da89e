//! Functional a posteriori error equalities and two-sided estimates for reaction-diffusion,
//! Poisson, time-dependent reaction-diffusion and heat problems, evaluated on analytic
//! fields over boxes and space-time cylinders.
//!
//! Every estimator returns both sides of its (in)equality together with the exact error
//! computed from a manufactured solution, so identities can be verified to quadrature
//! precision and bounds checked for ordering and efficiency.

pub mod analytic;
pub mod domain;
pub mod elliptic;
pub mod error;
pub mod exec;
pub mod field;
pub mod manufactured;
pub mod norms;
pub mod optimizer;
pub mod parabolic;
pub mod quadrature;
pub mod report;

pub use analytic::{Factor, SeparableSum, Term, VectorSpec};
pub use domain::BoxDomain;
pub use elliptic::{friedrichs_constant, FriedrichsConstant};
pub use error::{Error, Result};
pub use field::{FieldRef, Point, ScalarField, VectorField};
pub use manufactured::{make_case, perturb, ApproxPair, FreeStrategy, Level, ProblemCase, ProblemKind};
pub use norms::{Component, NormKind, Residual};
pub use quadrature::QuadratureRule;
pub use report::{BoundReport, Check, EqualityReport};
