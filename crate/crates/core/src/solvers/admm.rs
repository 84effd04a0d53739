use std::sync::{Arc, OnceLock};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use super::{MeasurementProblem, SolveResult, SolverError};

/// ADMM parameters for the weighted-lasso subproblem.
///
/// Convergence is declared when the primal residual `‖x − z‖` is below
/// `tol_primal` times the iterate scale and the dual residual
/// `ρ‖z⁺ − z‖` is below `tol_dual` times the dual-variable scale `‖ρu‖`,
/// floored at the rounding level of `Aᵀ(y − Ax)`.
///
/// Every so often the solver also tries an active-set polish: it solves the
/// optimality conditions exactly on a guessed support. A polish that
/// satisfies them is accepted as the solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdmmConfig {
    /// Initial augmented-Lagrangian penalty.
    pub rho: f64,
    pub max_iter: usize,
    pub tol_primal: f64,
    pub tol_dual: f64,
    /// Rebalance `rho` when the normalized residuals drift apart.
    pub adaptive_rho: bool,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            rho: 1.0,
            max_iter: 2000,
            tol_primal: 1e-8,
            tol_dual: 1e-8,
            adaptive_rho: true,
        }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let ok = self.rho > 0.0
            && self.rho.is_finite()
            && self.max_iter > 0
            && self.tol_primal > 0.0
            && self.tol_dual > 0.0;
        if ok {
            Ok(())
        } else {
            Err(SolverError::Config(format!("invalid ADMM config {self:?}")))
        }
    }
}

/// Outcome of one weighted-lasso solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmmReport {
    pub iterations: usize,
    pub converged: bool,
    /// `‖x − z‖`; zero when the solve ended through an active-set polish.
    pub primal_residual: f64,
    /// `ρ‖Δz‖`, or the stationarity residual of an accepted polish.
    pub dual_residual: f64,
    pub rho: f64,
}

/// Soft-thresholding, the proximal map of `tau·|·|`.
#[inline]
pub fn soft_threshold(v: f64, tau: f64) -> f64 {
    if v > tau {
        v - tau
    } else if v < -tau {
        v + tau
    } else {
        0.0
    }
}

const RHO_MU: f64 = 10.0;
const RHO_SCALE: f64 = 2.0;
const RHO_MIN: f64 = 1e-14;
const RHO_MAX: f64 = 1e14;
const REBALANCE_EVERY: usize = 5;
const POLISH_EVERY: usize = 10;
const POLISH_ROUNDS: usize = 64;

#[derive(Clone)]
enum Factor {
    /// `m < N`: Cholesky of `ρI + AAᵀ` (m×m).
    Wide {
        gram: DMatrix<f64>,
        chol: Cholesky<f64, Dyn>,
    },
    /// `m ≥ N`: Cholesky of `AᵀA + ρI` (N×N).
    Tall {
        gram: DMatrix<f64>,
        chol: Cholesky<f64, Dyn>,
    },
}

impl Factor {
    fn new(a: &DMatrix<f64>, rho: f64) -> Result<Self, SolverError> {
        if a.nrows() < a.ncols() {
            let gram = a * a.transpose();
            let chol = shifted_cholesky(&gram, rho)?;
            Ok(Factor::Wide { gram, chol })
        } else {
            let gram = a.transpose() * a;
            let chol = shifted_cholesky(&gram, rho)?;
            Ok(Factor::Tall { gram, chol })
        }
    }

    fn refactor(&mut self, rho: f64) -> Result<(), SolverError> {
        match self {
            Factor::Wide { gram, chol } | Factor::Tall { gram, chol } => {
                *chol = shifted_cholesky(gram, rho)?;
            }
        }
        Ok(())
    }
}

fn shifted_cholesky(gram: &DMatrix<f64>, rho: f64) -> Result<Cholesky<f64, Dyn>, SolverError> {
    let mut m = gram.clone();
    for i in 0..m.nrows() {
        m[(i, i)] += rho;
    }
    Cholesky::new(m).ok_or(SolverError::Factorization)
}

/// Warm-startable ADMM engine for
/// `min ½‖y − Ax‖² + λ Σ_j w_j |x_j|` with the splitting `x = z`.
///
/// The factorization is built once per problem and refreshed only when the
/// penalty parameter changes. Iterates persist between calls to
/// [`WeightedLassoAdmm::solve`], so successive solves start where the
/// previous one stopped.
#[derive(Clone)]
pub struct WeightedLassoAdmm<'a> {
    problem: &'a MeasurementProblem,
    cfg: AdmmConfig,
    factor: Factor,
    rho: f64,
    aty: DVector<f64>,
    x_scale_floor: f64,
    /// Rounding level of `Aᵀ(y − Ax)`; the dual test never asks for less.
    dual_floor: f64,
    x: DVector<f64>,
    z: DVector<f64>,
    /// Scaled dual variable; the unscaled multiplier is `rho * u`.
    u: DVector<f64>,
    // scratch
    v: DVector<f64>,
    r_m: DVector<f64>,
    /// `AᵀA`, built on the first polish and shared between clones.
    gram: Arc<OnceLock<DMatrix<f64>>>,
    /// Sign pattern of `z` at the last failed polish attempt.
    last_polish_signs: Vec<i8>,
}

impl<'a> WeightedLassoAdmm<'a> {
    pub fn new(problem: &'a MeasurementProblem, cfg: AdmmConfig) -> Result<Self, SolverError> {
        cfg.validate()?;
        let a = problem.a();
        let (m, n) = a.shape();
        let factor = Factor::new(a, cfg.rho)?;
        let a_norm = a.norm();
        let x_scale_floor = if a_norm > 0.0 {
            problem.y().norm() / a_norm
        } else {
            0.0
        };
        Ok(Self {
            problem,
            cfg,
            factor,
            rho: cfg.rho,
            aty: a.tr_mul(problem.y()),
            x_scale_floor,
            dual_floor: f64::EPSILON * (n as f64).sqrt() * a_norm * problem.y().norm(),
            x: DVector::zeros(n),
            z: DVector::zeros(n),
            u: DVector::zeros(n),
            v: DVector::zeros(n),
            r_m: DVector::zeros(m),
            gram: Arc::new(OnceLock::new()),
            last_polish_signs: Vec::new(),
        })
    }

    /// Current sparse iterate (the thresholded copy `z`).
    pub fn solution(&self) -> &DVector<f64> {
        &self.z
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn problem(&self) -> &'a MeasurementProblem {
        self.problem
    }

    fn x_update(&mut self) {
        // v = z - u
        self.v.copy_from(&self.z);
        self.v -= &self.u;
        let a = self.problem.a();
        match &self.factor {
            Factor::Wide { chol, .. } => {
                // x = v + Aᵀ (ρI + AAᵀ)⁻¹ (y − A v)
                self.r_m.copy_from(self.problem.y());
                self.r_m.gemv(-1.0, a, &self.v, 1.0);
                chol.solve_mut(&mut self.r_m);
                self.x.copy_from(&self.v);
                self.x.gemv_tr(1.0, a, &self.r_m, 1.0);
            }
            Factor::Tall { chol, .. } => {
                // (AᵀA + ρI) x = Aᵀy + ρ v
                self.x.copy_from(&self.aty);
                self.x.axpy(self.rho, &self.v, 1.0);
                chol.solve_mut(&mut self.x);
            }
        }
    }

    /// Runs ADMM from the current state until convergence or `max_iter`.
    pub fn solve(&mut self, weights: &[f64], lambda: f64) -> Result<AdmmReport, SolverError> {
        let n = self.x.len();
        if weights.len() != n {
            return Err(SolverError::Dimension(format!(
                "weights have length {}, expected {n}",
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(SolverError::Config(format!("invalid weight {w}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(SolverError::Config(format!(
                "lambda must be positive, got {lambda}"
            )));
        }

        let mut report = AdmmReport {
            iterations: 0,
            converged: false,
            primal_residual: f64::INFINITY,
            dual_residual: f64::INFINITY,
            rho: self.rho,
        };
        // Weights differ from the previous call, so a stale sign pattern is
        // worth retrying; a warm start often already has the right support.
        self.last_polish_signs.clear();
        if self.z.iter().any(|&v| v != 0.0) {
            if let Some(kkt) = self.try_polish(weights, lambda) {
                report.converged = true;
                report.primal_residual = 0.0;
                report.dual_residual = kkt;
                return Ok(report);
            }
        }
        // Failed polish attempts back off geometrically.
        let mut polish_gap = POLISH_EVERY;
        let mut next_polish = POLISH_EVERY;
        for iter in 1..=self.cfg.max_iter {
            self.x_update();

            let mut dz2 = 0.0;
            let mut r2 = 0.0;
            for j in 0..n {
                let xj = self.x[j];
                let old = self.z[j];
                let zj = soft_threshold(xj + self.u[j], lambda * weights[j] / self.rho);
                self.z[j] = zj;
                self.u[j] += xj - zj;
                dz2 += (zj - old) * (zj - old);
                r2 += (xj - zj) * (xj - zj);
            }
            let primal = r2.sqrt();
            let dual = self.rho * dz2.sqrt();

            let x_scale = self.x.norm().max(self.z.norm()).max(self.x_scale_floor);
            let u_scale = self.rho * self.u.norm();
            let eps_pri = self.cfg.tol_primal * x_scale;
            let eps_dual = (self.cfg.tol_dual * u_scale).max(self.dual_floor);

            report.iterations = iter;
            report.primal_residual = primal;
            report.dual_residual = dual;
            if primal <= eps_pri && dual <= eps_dual {
                report.converged = true;
                break;
            }

            if iter == next_polish {
                if let Some(kkt) = self.try_polish(weights, lambda) {
                    report.converged = true;
                    report.primal_residual = 0.0;
                    report.dual_residual = kkt;
                    break;
                }
                polish_gap *= 2;
                next_polish = iter + polish_gap;
            }

            if self.cfg.adaptive_rho && iter % REBALANCE_EVERY == 0 {
                let r_rel = primal / x_scale.max(f64::MIN_POSITIVE);
                let s_rel = dual / u_scale.max(f64::MIN_POSITIVE);
                let new_rho = if r_rel > RHO_MU * s_rel {
                    self.rho * RHO_SCALE
                } else if s_rel > RHO_MU * r_rel {
                    self.rho / RHO_SCALE
                } else {
                    self.rho
                };
                let new_rho = new_rho.clamp(RHO_MIN, RHO_MAX);
                if new_rho != self.rho {
                    self.u *= self.rho / new_rho;
                    self.rho = new_rho;
                    self.factor.refactor(new_rho)?;
                }
            }
        }
        report.rho = self.rho;
        Ok(report)
    }
}

impl WeightedLassoAdmm<'_> {
    /// Active-set refinement started from the sign pattern of `z`: solves the
    /// optimality conditions on a candidate support, drops sign flips, adds
    /// off-support violators of `|a_jᵀ(y − Ax)| ≤ λ w_j`, and pivots when the
    /// support is full. On success the exact minimizer is installed as the
    /// ADMM state and the on-support stationarity residual is returned.
    fn try_polish(&mut self, weights: &[f64], lambda: f64) -> Option<f64> {
        let signs: Vec<i8> = self
            .z
            .iter()
            .map(|&v| (v > 0.0) as i8 - (v < 0.0) as i8)
            .collect();
        if signs == self.last_polish_signs {
            return None;
        }
        let accepted = self.polish_with(&signs, weights, lambda);
        if accepted.is_none() {
            self.last_polish_signs = signs;
        }
        accepted
    }

    fn polish_with(&mut self, signs: &[i8], weights: &[f64], lambda: f64) -> Option<f64> {
        let a = self.problem.a();
        let (m, n) = a.shape();
        let gram = self.gram.get_or_init(|| a.tr_mul(a));
        let aty = &self.aty;
        let cap = m.min(n);
        let mut active: Vec<i8> = signs.to_vec();
        if active.iter().filter(|&&v| v != 0).count() > cap {
            // keep the largest entries of z
            let mut order: Vec<usize> = (0..n).filter(|&j| active[j] != 0).collect();
            order.sort_by(|&i, &j| self.z[j].abs().total_cmp(&self.z[i].abs()));
            for &j in &order[cap..] {
                active[j] = 0;
            }
        }
        for _ in 0..POLISH_ROUNDS {
            let support: Vec<usize> = (0..n).filter(|&j| active[j] != 0).collect();
            let mut candidate = DVector::zeros(n);
            let mut system = None;
            if !support.is_empty() {
                let rs = RestrictedSystem::new(gram, &support)?;
                let rhs = DVector::from_iterator(
                    support.len(),
                    support
                        .iter()
                        .map(|&j| aty[j] - lambda * weights[j] * f64::from(active[j])),
                );
                let coef = rs.solve(rhs);
                let mut flipped = false;
                for (&j, &v) in support.iter().zip(coef.iter()) {
                    if v * f64::from(active[j]) <= 0.0 {
                        active[j] = 0;
                        flipped = true;
                    } else {
                        candidate[j] = v;
                    }
                }
                if flipped {
                    continue;
                }
                system = Some(rs);
            }
            // Aᵀ(y − Ax) through the Gram matrix.
            let mut grad = aty.clone();
            for &j in &support {
                grad.axpy(-candidate[j], &gram.column(j), 1.0);
            }
            // Off-support violators, strongest relative violation first.
            let mut violators: Vec<(f64, usize)> = (0..n)
                .filter(|&j| active[j] == 0)
                .filter_map(|j| {
                    let bound = lambda * weights[j];
                    let g = grad[j].abs();
                    (g > bound * (1.0 + 1e-9) + 1e-15).then(|| (g / bound, j))
                })
                .collect();
            if violators.is_empty() {
                let kkt = support
                    .iter()
                    .map(|&j| (grad[j] - lambda * weights[j] * f64::from(active[j])).powi(2))
                    .sum::<f64>()
                    .sqrt();
                // same test as the ADMM dual residual, with ρu = Aᵀ(y − Ax)
                if kkt > (self.cfg.tol_dual * grad.norm()).max(self.dual_floor) {
                    return None;
                }
                self.x.copy_from(&candidate);
                self.z.copy_from(&candidate);
                self.u.copy_from(&grad);
                self.u /= self.rho;
                return Some(kkt);
            }
            violators.sort_by(|a, b| b.0.total_cmp(&a.0));
            let room = cap - support.len();
            if room > 0 {
                for &(_, j) in violators.iter().take(room) {
                    active[j] = if grad[j] > 0.0 { 1 } else { -1 };
                }
                continue;
            }
            // Full support: swap the top violator in along the kernel
            // direction of the enlarged column set, dropping the first
            // coefficient that reaches zero.
            let rs = system?;
            let enter = violators[0].1;
            let cross =
                DVector::from_iterator(support.len(), support.iter().map(|&i| gram[(i, enter)]));
            let sign = if grad[enter] > 0.0 { 1.0 } else { -1.0 };
            // x_S moves along -sign * dir as the entering coefficient grows
            let dir = rs.solve(cross) * sign;
            let (_, leave) = support
                .iter()
                .zip(dir.iter())
                .filter(|&(&j, &d)| d * f64::from(active[j]) > 0.0)
                .map(|(&j, &d)| (candidate[j].abs() / d.abs(), j))
                .min_by(|a, b| a.0.total_cmp(&b.0))?;
            active[leave] = 0;
            active[enter] = sign as i8;
        }
        None
    }
}

/// Cholesky factor of the Gram block `A_Sᵀ A_S` on a candidate support.
struct RestrictedSystem {
    chol: Cholesky<f64, Dyn>,
}

impl RestrictedSystem {
    fn new(gram: &DMatrix<f64>, support: &[usize]) -> Option<Self> {
        let k = support.len();
        let block = DMatrix::from_fn(k, k, |r, c| gram[(support[r], support[c])]);
        let scale = block.diagonal().amax();
        let chol = block.cholesky()?;
        // reject numerically rank-deficient supports
        let l = chol.l_dirty();
        let min_pivot = (0..k)
            .map(|i| l[(i, i)] * l[(i, i)])
            .fold(f64::INFINITY, f64::min);
        if min_pivot <= 1e-12 * scale {
            return None;
        }
        Some(Self { chol })
    }

    fn solve(&self, rhs: DVector<f64>) -> DVector<f64> {
        self.chol.solve(&rhs)
    }
}

/// Weighted-lasso objective `½‖y − Ax‖² + λ Σ w_j |x_j|`.
pub fn weighted_lasso_objective(
    problem: &MeasurementProblem,
    x: &DVector<f64>,
    weights: &[f64],
    lambda: f64,
) -> f64 {
    let resid = problem.y() - problem.a() * x;
    let l1: f64 = x.iter().zip(weights).map(|(v, w)| w * v.abs()).sum();
    0.5 * resid.norm_squared() + lambda * l1
}

/// Solves `min ½‖y − Ax‖² + λ Σ w_j |x_j|` by ADMM from a zero start.
///
/// Running out of iterations is not an error; the result carries
/// `converged = false`.
pub fn solve_weighted_lasso(
    problem: &MeasurementProblem,
    weights: &[f64],
    lambda: f64,
    cfg: &AdmmConfig,
) -> Result<SolveResult, SolverError> {
    let mut engine = WeightedLassoAdmm::new(problem, *cfg)?;
    let report = engine.solve(weights, lambda)?;
    let xhat = engine.solution().clone();
    let objective = weighted_lasso_objective(problem, &xhat, weights, lambda);
    Ok(SolveResult {
        xhat: xhat.iter().copied().collect(),
        outer_iters: 1,
        total_inner_iters: report.iterations,
        objective_trace: vec![objective],
        converged: report.converged,
        primal_residual: report.primal_residual,
        dual_residual: report.dual_residual,
    })
}

/// Plain lasso: [`solve_weighted_lasso`] with unit weights.
pub fn solve_l1(
    problem: &MeasurementProblem,
    lambda: f64,
    cfg: &AdmmConfig,
) -> Result<SolveResult, SolverError> {
    let ones = vec![1.0; problem.cols()];
    solve_weighted_lasso(problem, &ones, lambda, cfg)
}
