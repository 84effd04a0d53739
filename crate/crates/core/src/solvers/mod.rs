//! ADMM weighted-lasso solver, the IRL1 outer loop, and the ℓ1 baseline.

mod admm;
mod irl1;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::penalties::{PenaltyError, PenaltyModel, SpecError};

pub use admm::{
    soft_threshold, solve_l1, solve_weighted_lasso, weighted_lasso_objective, AdmmConfig,
    AdmmReport, WeightedLassoAdmm,
};
pub use irl1::{check_irl1_model, irl1, irl1_from_pass, penalized_objective, Irl1Config, L1Pass};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("model {model} is unsupported by IRL1: {reason}")]
    UnsupportedModel { model: String, reason: String },
    #[error("Cholesky factorization failed")]
    Factorization,
    #[error(transparent)]
    Penalty(#[from] PenaltyError),
}

/// Linear measurement model `y = A x`, optionally with the ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementProblem {
    a: DMatrix<f64>,
    y: DVector<f64>,
    truth: Option<DVector<f64>>,
}

impl MeasurementProblem {
    pub fn new(
        a: DMatrix<f64>,
        y: DVector<f64>,
        truth: Option<DVector<f64>>,
    ) -> Result<Self, SolverError> {
        let (m, n) = a.shape();
        if m == 0 || n == 0 {
            return Err(SolverError::Dimension(format!("matrix is {m}x{n}")));
        }
        if y.len() != m {
            return Err(SolverError::Dimension(format!(
                "y has length {}, matrix has {m} rows",
                y.len()
            )));
        }
        if let Some(t) = &truth {
            if t.len() != n {
                return Err(SolverError::Dimension(format!(
                    "truth has length {}, matrix has {n} columns",
                    t.len()
                )));
            }
            if t.iter().any(|v| !v.is_finite()) {
                return Err(SolverError::NonFinite("truth"));
            }
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::NonFinite("matrix"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::NonFinite("observation"));
        }
        Ok(Self { a, y, truth })
    }

    /// Noiseless problem `y = A x` with `x` kept as the truth.
    pub fn noiseless(a: DMatrix<f64>, x: DVector<f64>) -> Result<Self, SolverError> {
        if x.len() != a.ncols() {
            return Err(SolverError::Dimension(format!(
                "signal has length {}, matrix has {} columns",
                x.len(),
                a.ncols()
            )));
        }
        let y = &a * &x;
        Self::new(a, y, Some(x))
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn truth(&self) -> Option<&DVector<f64>> {
        self.truth.as_ref()
    }

    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn cols(&self) -> usize {
        self.a.ncols()
    }

    /// `‖x̂ − x‖₂ / ‖x‖₂` against the stored truth.
    pub fn relative_error(&self, xhat: &[f64]) -> Option<f64> {
        let truth = self.truth.as_ref()?;
        let diff: f64 = truth
            .iter()
            .zip(xhat)
            .map(|(t, x)| (t - x) * (t - x))
            .sum::<f64>()
            .sqrt();
        let scale = truth.norm();
        Some(if scale > 0.0 { diff / scale } else { diff })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub xhat: Vec<f64>,
    pub outer_iters: usize,
    pub total_inner_iters: usize,
    /// Objective after each outer iteration.
    pub objective_trace: Vec<f64>,
    pub converged: bool,
    /// Residuals of the final inner ADMM solve.
    pub primal_residual: f64,
    pub dual_residual: f64,
}

/// What a sweep or a single solve regularizes with: the plain ℓ1 norm or a
/// CDF-induced penalty handled by IRL1.
#[derive(Debug, Clone, PartialEq)]
pub enum Regularizer {
    L1,
    Cdf(PenaltyModel),
}

impl Regularizer {
    pub fn solve(
        &self,
        problem: &MeasurementProblem,
        cfg: &Irl1Config,
        admm: &AdmmConfig,
    ) -> Result<SolveResult, SolverError> {
        match self {
            Regularizer::L1 => {
                cfg.validate()?;
                solve_l1(problem, cfg.lambda, admm)
            }
            Regularizer::Cdf(model) => irl1(problem, model, cfg, admm),
        }
    }

    /// Solves starting from a shared unit-weight pass.
    pub fn solve_from_pass(
        &self,
        pass: &L1Pass<'_>,
        cfg: &Irl1Config,
    ) -> Result<SolveResult, SolverError> {
        match self {
            Regularizer::L1 => Ok(pass.result()),
            Regularizer::Cdf(model) => irl1_from_pass(pass, model, cfg),
        }
    }
}

impl fmt::Display for Regularizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regularizer::L1 => f.write_str("l1"),
            Regularizer::Cdf(m) => m.fmt(f),
        }
    }
}

impl FromStr for Regularizer {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("l1") || t.eq_ignore_ascii_case("l1()") {
            Ok(Regularizer::L1)
        } else {
            t.parse().map(Regularizer::Cdf)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn problem_validation() {
        let a = DMatrix::<f64>::zeros(2, 3);
        assert!(MeasurementProblem::new(a.clone(), DVector::zeros(3), None).is_err());
        assert!(
            MeasurementProblem::new(a.clone(), DVector::zeros(2), Some(DVector::zeros(2))).is_err()
        );
        assert!(
            MeasurementProblem::new(a.clone(), DVector::from_vec(vec![1.0, f64::NAN]), None)
                .is_err()
        );
        assert!(MeasurementProblem::new(a, DVector::zeros(2), Some(DVector::zeros(3))).is_ok());
    }

    #[test]
    fn regularizer_parsing() {
        assert_eq!("l1".parse::<Regularizer>().unwrap(), Regularizer::L1);
        let r: Regularizer = "weibull(k=1,sigma=1)".parse().unwrap();
        assert_eq!(r.to_string(), "weibull(k=1,sigma=1)");
    }
}
