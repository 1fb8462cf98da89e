//! Batch driver for the funcest estimators: strict JSON configuration, parallel execution
//! with order-stable records, and JSON / CSV / plot-data output.

pub mod config;
pub mod emit;
pub mod estimator;
pub mod run;
pub mod suite;

pub use config::{parse_config, ConfigError, Format, RunConfig};
pub use estimator::{EstimatorName, EstimatorSpec, Family, Outcome};
pub use run::{run, RunOutput, RunReport};
