use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::admm::{weighted_lasso_objective, AdmmConfig, AdmmReport, WeightedLassoAdmm};
use super::{MeasurementProblem, SolveResult, SolverError};
use crate::penalties::{Concavity, Family, PenaltyModel, DEFAULT_WEIGHT_EPS};

/// Outer-loop settings for iteratively reweighted ℓ1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Irl1Config {
    /// Regularization weight λ in `½‖y − Ax‖² + λ J(x)`.
    pub lambda: f64,
    pub max_outer: usize,
    /// Additive smoothing inside the weight: `w_j = f(|x_j| + eps)`.
    pub eps: f64,
    /// Stop once `‖x⁺ − x‖ / max(‖x‖, 1e-12)` falls to this value.
    pub stop_tol: f64,
}

impl Default for Irl1Config {
    fn default() -> Self {
        Self {
            lambda: 1e-7,
            max_outer: 20,
            eps: DEFAULT_WEIGHT_EPS,
            stop_tol: 1e-8,
        }
    }
}

impl Irl1Config {
    pub fn validate(&self) -> Result<(), SolverError> {
        let ok = self.lambda > 0.0
            && self.lambda.is_finite()
            && self.max_outer > 0
            && self.eps >= 0.0
            && self.eps.is_finite()
            && self.stop_tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(SolverError::Config(format!("invalid IRL1 config {self:?}")))
        }
    }
}

/// Penalized objective `½‖y − Ax‖² + λ J(x)`.
pub fn penalized_objective(
    problem: &MeasurementProblem,
    model: &PenaltyModel,
    x: &DVector<f64>,
    lambda: f64,
) -> f64 {
    let resid = problem.y() - problem.a() * x;
    0.5 * resid.norm_squared() + lambda * model.penalty_unchecked(x.as_slice())
}

/// The unit-weight first pass shared by every IRL1 run on a problem.
///
/// Its result is the plain lasso solution; cloning the pass lets several
/// penalties continue from the same starting point.
#[derive(Clone)]
pub struct L1Pass<'a> {
    engine: WeightedLassoAdmm<'a>,
    report: AdmmReport,
    lambda: f64,
}

impl<'a> L1Pass<'a> {
    pub fn run(
        problem: &'a MeasurementProblem,
        lambda: f64,
        admm: &AdmmConfig,
    ) -> Result<Self, SolverError> {
        let mut engine = WeightedLassoAdmm::new(problem, *admm)?;
        let ones = vec![1.0; problem.cols()];
        let report = engine.solve(&ones, lambda)?;
        Ok(Self {
            engine,
            report,
            lambda,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn solution(&self) -> &DVector<f64> {
        self.engine.solution()
    }

    /// The lasso solution as a standalone result.
    pub fn result(&self) -> SolveResult {
        let x = self.engine.solution();
        let ones = vec![1.0; x.len()];
        SolveResult {
            xhat: x.iter().copied().collect(),
            outer_iters: 1,
            total_inner_iters: self.report.iterations,
            objective_trace: vec![weighted_lasso_objective(
                self.engine_problem(),
                x,
                &ones,
                self.lambda,
            )],
            converged: self.report.converged,
            primal_residual: self.report.primal_residual,
            dual_residual: self.report.dual_residual,
        }
    }

    fn engine_problem(&self) -> &'a MeasurementProblem {
        self.engine.problem()
    }
}

/// Rejects models IRL1 cannot handle.
pub fn check_irl1_model(model: &PenaltyModel) -> Result<(), SolverError> {
    if model.family() == Family::DiracDelta {
        return Err(SolverError::UnsupportedModel {
            model: model.to_string(),
            reason: "the ℓ0 penalty has no density to linearize".to_string(),
        });
    }
    if model.concavity() == Concavity::NotConcave {
        return Err(SolverError::UnsupportedModel {
            model: model.to_string(),
            reason:
                "IRL1 requires a concave penalty (non-increasing density, e.g. Weibull k <= 1); \
                     non-concave penalties need a DC or iteratively reweighted tight convex \
                     scheme, which is not implemented"
                    .to_string(),
        });
    }
    Ok(())
}

/// Iteratively reweighted ℓ1 for `min ½‖y − Ax‖² + λ J(x)`.
///
/// Starts from unit weights, then alternates a weighted-lasso solve with the
/// reweighting `w_j = f(|x_j| + eps)`. Each inner solve is warm-started from
/// the previous outer iterate.
pub fn irl1(
    problem: &MeasurementProblem,
    model: &PenaltyModel,
    cfg: &Irl1Config,
    admm: &AdmmConfig,
) -> Result<SolveResult, SolverError> {
    check_irl1_model(model)?;
    cfg.validate()?;
    let pass = L1Pass::run(problem, cfg.lambda, admm)?;
    irl1_from_pass(&pass, model, cfg)
}

/// Continues IRL1 from a completed unit-weight pass. `cfg.lambda` must
/// match the pass.
pub fn irl1_from_pass(
    pass: &L1Pass<'_>,
    model: &PenaltyModel,
    cfg: &Irl1Config,
) -> Result<SolveResult, SolverError> {
    check_irl1_model(model)?;
    cfg.validate()?;
    if cfg.lambda != pass.lambda {
        return Err(SolverError::Config(format!(
            "IRL1 lambda {} differs from the first-pass lambda {}",
            cfg.lambda, pass.lambda
        )));
    }
    let problem = pass.engine_problem();
    let mut engine = pass.engine.clone();
    let mut report = pass.report;
    let mut total_inner = report.iterations;

    let mut prev = DVector::<f64>::zeros(problem.cols());
    let mut trace = Vec::with_capacity(cfg.max_outer);
    let mut weights = vec![0.0; problem.cols()];
    let mut converged = false;
    let mut outer = 0;

    loop {
        outer += 1;
        let x = engine.solution().clone();
        trace.push(penalized_objective(problem, model, &x, cfg.lambda));
        let change = (&x - &prev).norm() / prev.norm().max(1e-12);
        prev = x;
        if change <= cfg.stop_tol {
            converged = true;
            break;
        }
        if outer == cfg.max_outer {
            break;
        }
        for (w, v) in weights.iter_mut().zip(prev.iter()) {
            *w = model.irl1_weight(v.abs(), cfg.eps)?;
        }
        report = engine.solve(&weights, cfg.lambda)?;
        total_inner += report.iterations;
    }

    Ok(SolveResult {
        xhat: prev.iter().copied().collect(),
        outer_iters: outer,
        total_inner_iters: total_inner,
        objective_trace: trace,
        converged,
        primal_residual: report.primal_residual,
        dual_residual: report.dual_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn small_problem(y: Vec<f64>) -> MeasurementProblem {
        let a = DMatrix::from_row_slice(2, 4, &[1.0, 0.5, -0.3, 2.0, 0.2, -1.0, 1.5, 0.7]);
        MeasurementProblem::new(a, DVector::from_vec(y), None).unwrap()
    }

    #[test]
    fn zero_observation_stops_immediately() {
        let p = small_problem(vec![0.0, 0.0]);
        let m = PenaltyModel::weibull(0.5, 1.0).unwrap();
        let res = irl1(&p, &m, &Irl1Config::default(), &AdmmConfig::default()).unwrap();
        assert!(res.xhat.iter().all(|&v| v == 0.0));
        assert_eq!(res.outer_iters, 1);
        assert!(res.converged);
    }

    #[test]
    fn non_concave_model_is_rejected() {
        let p = small_problem(vec![1.0, 0.0]);
        let m = PenaltyModel::weibull(2.0, 1.0).unwrap();
        let err = irl1(&p, &m, &Irl1Config::default(), &AdmmConfig::default()).unwrap_err();
        assert!(matches!(err, SolverError::UnsupportedModel { .. }));
        assert!(err.to_string().contains("concave"));
    }

    #[test]
    fn dirac_is_rejected() {
        let p = small_problem(vec![1.0, 0.0]);
        assert!(irl1(
            &p,
            &PenaltyModel::dirac(),
            &Irl1Config::default(),
            &AdmmConfig::default()
        )
        .is_err());
    }

    #[test]
    fn lambda_mismatch_with_pass() {
        let p = small_problem(vec![1.0, 0.0]);
        let pass = L1Pass::run(&p, 0.1, &AdmmConfig::default()).unwrap();
        let cfg = Irl1Config {
            lambda: 0.2,
            ..Irl1Config::default()
        };
        let m = PenaltyModel::exponential(1.0).unwrap();
        assert!(irl1_from_pass(&pass, &m, &cfg).is_err());
    }
}
