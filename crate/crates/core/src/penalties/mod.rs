//! CDF-induced separable penalties.
//!
//! Any density `f` on `[0, ∞)` induces the penalty `J(x) = Σ_j F(|x_j|)`
//! where `F` is its CDF. `J` maps into `[0, N]`, vanishes only at zero,
//! is sign-symmetric and monotone in `|x|`, and is concave and subadditive
//! whenever `f` is non-increasing.

mod family;
mod model;
mod spec;

use thiserror::Error;

pub use family::{Concavity, Family};
pub use model::{PenaltyModel, DEFAULT_WEIGHT_EPS};
pub use spec::{parse_model, SpecError, SpecParseError};

pub(crate) use spec::{parse_raw, resolve_params};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PenaltyError {
    #[error("argument {0} is outside the domain [0, ∞)")]
    Domain(f64),
    #[error("probability {0} is outside [0, 1)")]
    Probability(f64),
    #[error("non-finite entry {0} in input vector")]
    NonFinite(f64),
    #[error("{family}: expected {expected} parameters, got {got}")]
    ParamCount {
        family: Family,
        expected: usize,
        got: usize,
    },
    #[error("{family}: parameter {name}={value} must be {constraint}")]
    InvalidParam {
        family: Family,
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error("{family} has no parameter named '{name}'")]
    UnknownParam { family: Family, name: String },
    #[error("{family} does not support {operation}")]
    Unsupported {
        family: Family,
        operation: &'static str,
    },
    #[error("{family} density diverges at 0; use a positive smoothing eps")]
    Singularity { family: Family },
    #[error("F(1) = 0, the curve cannot be normalized through (1, 1)")]
    DegenerateScale,
}
