//! Exact closed-form objects: the threshold function zeta, the u_k
//! counterexample family, the smooth-cutoff construction for the general
//! two-component counterexample, and the registry of explicit example
//! systems with hand-coded derivatives.

mod family;
mod field;
mod prop16;
mod registry;
mod zeta;

pub use family::{u_k_family, u_k_prime_at_zero, u_limit_field, ZetaQuery};
pub use field::{residual, AnalyticField, FieldComponent};
pub use prop16::{prop16_construct, prop16_system, Prop16Construction, Prop16Params};
pub use registry::{
    example_registry, unit_disk_points, unit_square_points, ExpectedVerdict, RegistryEntry,
};
pub use zeta::{c_threshold, wmp_fails_prediction, zeta, zeta_curve_value};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ClosedFormError {
    #[error("tau must be positive, got {0}")]
    NonPositiveTau(f64),
    #[error("c must be positive, got {0}")]
    NonPositiveC(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("field has {field} components, system expects {system}")]
    DimensionMismatch { field: usize, system: usize },
    #[error("unknown registry id: {0}")]
    UnknownId(String),
}
