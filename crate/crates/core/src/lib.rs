//! Grenander estimator of a decreasing density and consistent estimators of
//! its value at the boundary of the support.
//!
//! * [`estimator`]: the Grenander estimator, its inverse process.
//! * [`boundary`]: simple, adaptive and scale-equivariant estimators of `f(0)`
//!   and of `f` at a finite upper endpoint.
//! * [`penalized`]: the penalized NPMLE with its data-driven smoothing.
//! * [`limits`]: limiting constants and Monte Carlo for the Brownian limits.
//! * [`sampling`]: reproducible samples from the test distributions.
//! * [`harness`]: replicated experiments and their tables.

pub mod boundary;
pub mod error;
pub mod estimator;
pub mod exec;
pub mod harness;
pub mod hull;
pub mod limits;
pub mod penalized;
pub mod sample;
pub mod sampling;
pub mod stats;

pub use boundary::{BoundaryFit, Method, ZeroEstimate, DEFAULT_CSTAR};
pub use error::{Error, Result};
pub use estimator::{grenander, inverse_process, switching_check, StepDensity};
pub use exec::Exec;
pub use harness::{emit_table, run_experiment, ExperimentConfig, ExperimentReport, TableFormat};
pub use penalized::{penalized_fit, penalized_zero, PenalizedFit};
pub use sample::Sample;
pub use sampling::{DistributionSpec, Family};
