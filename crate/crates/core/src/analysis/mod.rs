//! Diagnostics for the recovery theory of CDF-induced penalties: null-space
//! falsification, spherical-section constants and the induced error bound,
//! the Irwin–Hall law of `J(x)` for random signals, and parameter sweeps of
//! `J` as a sparsity measure.

mod bound;
mod gnsp;
mod irwin_hall;
mod kernel;
mod spherical;
mod sweep;

use thiserror::Error;

use crate::penalties::{PenaltyError, SpecParseError};

pub use bound::{check_solution_penalty, recovery_bound, BoundReport, SolutionCheck};
pub use gnsp::{
    gnsp_falsify, gnsp_falsify_with, worst_support, GnspReport, GnspSearch, GnspVerdict,
};
pub use irwin_hall::{irwin_hall_cdf, irwin_hall_check, ks_critical_value, IrwinHallStats};
pub use kernel::{kernel_basis, KernelParameterization, RANK_THRESHOLD};
pub use spherical::{delta_q, delta_q_seeded, section_ratio, DeltaEstimate, DeltaMode};
pub use sweep::{sparsity_sweep, ThetaSweep};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Penalty(#[from] PenaltyError),
    #[error("bound denominator {denominator} is not positive (delta_q = {delta_q})")]
    DegenerateBound { delta_q: f64, denominator: f64 },
    #[error("sweep template: {0}")]
    Template(String),
}

impl From<SpecParseError> for AnalysisError {
    fn from(e: SpecParseError) -> Self {
        AnalysisError::Template(e.to_string())
    }
}

/// Serializes non-finite floats as the strings `"inf"`, `"-inf"`, `"nan"`,
/// which plain JSON numbers cannot represent.
pub mod float_or_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a float: {other}"))),
            },
        }
    }
}

pub(crate) fn lq_norm(v: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    } else {
        // scaled to avoid overflow for large q
        let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        scale
            * v.iter()
                .map(|x| (x.abs() / scale).powf(q))
                .sum::<f64>()
                .powf(1.0 / q)
    }
}

pub(crate) fn validate_q(q: f64) -> Result<(), AnalysisError> {
    if q > 1.0 && !q.is_nan() {
        Ok(())
    } else {
        Err(AnalysisError::Input(format!(
            "q must lie in (1, inf], got {q}"
        )))
    }
}
