use std::fmt;

use super::AnalysisError;
use crate::penalties::{parse_raw, resolve_params, Family, PenaltyError, PenaltyModel};

/// A penalty family with one free parameter driven by a scalar `θ`.
///
/// The free parameter equals `θ`, or `1/θ` when `reciprocal` is set (so that
/// `θ` can act as a rate for scale families).
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSweep {
    family: Family,
    fixed: Vec<Option<f64>>,
    free: usize,
    reciprocal: bool,
}

impl ThetaSweep {
    /// Template such as `"weibull(k=1.5)"`: exactly one family parameter is
    /// left out and becomes the swept one.
    pub fn parse(template: &str, reciprocal: bool) -> Result<Self, AnalysisError> {
        let (family, args, _) = parse_raw(template)?;
        let fixed = resolve_params(template, family, &args, true)?;
        let missing: Vec<usize> = (0..fixed.len()).filter(|&i| fixed[i].is_none()).collect();
        match missing.as_slice() {
            [free] => Ok(Self {
                family,
                fixed,
                free: *free,
                reciprocal,
            }),
            [] => Err(AnalysisError::Template(format!(
                "'{template}' fixes every parameter; leave one out to sweep it"
            ))),
            _ => Err(AnalysisError::Template(format!(
                "'{template}' leaves {} parameters open; only one can be swept",
                missing.len()
            ))),
        }
    }

    /// Sweep over the sole parameter of a one-parameter family. The
    /// exponential family is swept by its rate `θ = 1/σ`.
    pub fn for_family(family: Family) -> Result<Self, AnalysisError> {
        let names = family.param_names();
        if names.len() != 1 {
            return Err(AnalysisError::Template(format!(
                "{family} has {} parameters; give a template fixing all but one",
                names.len()
            )));
        }
        Ok(Self {
            family,
            fixed: vec![None],
            free: 0,
            reciprocal: family == Family::Exponential,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn parameter(&self) -> &'static str {
        self.family.param_names()[self.free]
    }

    pub fn reciprocal(&self) -> bool {
        self.reciprocal
    }

    pub fn model_at(&self, theta: f64) -> Result<PenaltyModel, PenaltyError> {
        let value = if self.reciprocal { 1.0 / theta } else { theta };
        let params: Vec<f64> = self
            .fixed
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if i == self.free {
                    value
                } else {
                    v.expect("fixed slot")
                }
            })
            .collect();
        PenaltyModel::new(self.family, &params)
    }
}

impl fmt::Display for ThetaSweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.family)?;
        for (i, (name, v)) in self
            .family
            .param_names()
            .iter()
            .zip(&self.fixed)
            .enumerate()
        {
            if i > 0 {
                f.write_str(",")?;
            }
            match v {
                Some(v) => write!(f, "{name}={v}")?,
                None if self.reciprocal => write!(f, "{name}=1/theta")?,
                None => write!(f, "{name}=theta")?,
            }
        }
        f.write_str(")")
    }
}

/// `J_θ(x)` at every grid point. Invalid grid values yield an error for that
/// point only.
pub fn sparsity_sweep(
    sweep: &ThetaSweep,
    theta_grid: &[f64],
    x: &[f64],
) -> Vec<Result<f64, PenaltyError>> {
    theta_grid
        .iter()
        .map(|&theta| sweep.model_at(theta)?.penalty(x))
        .collect()
}
