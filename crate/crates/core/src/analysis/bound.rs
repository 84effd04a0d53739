use serde::{Deserialize, Serialize};

use super::{float_or_inf, validate_q, AnalysisError};
use crate::penalties::PenaltyModel;

/// Error bound `‖x̂ − x‖_q ≤ N·α / (Δ^(1−1/q) − ⌈Δ−1⌉^(1−1/q))` together with
/// the conditions under which it applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub delta_q: f64,
    #[serde(with = "float_or_inf")]
    pub q: f64,
    pub n: usize,
    pub s: usize,
    pub model: String,
    /// `F⁻¹(1 − 1/N)`.
    pub alpha_theta: f64,
    /// Sparsity threshold `2^(q/(1−q))·Δ`; the bound needs `s < s_max`.
    pub s_max: f64,
    pub bound_value: f64,
    pub sparsity_condition: bool,
    /// Penalty-budget gate on a concrete solution, when one was supplied.
    pub solution: Option<SolutionCheck>,
}

impl BoundReport {
    /// True when every checked precondition holds.
    pub fn applicable(&self) -> bool {
        self.sparsity_condition && self.solution.as_ref().is_none_or(|c| c.holds)
    }

    /// Adds the gate `J(x̂) ≤ ⌈Δ−1⌉ − s` evaluated at `xhat`.
    pub fn gate_solution(
        &mut self,
        model: &PenaltyModel,
        xhat: &[f64],
    ) -> Result<(), AnalysisError> {
        self.solution = Some(check_solution_penalty(model, xhat, self.delta_q, self.s)?);
        Ok(())
    }
}

/// `J(x̂)` against the budget `⌈Δ−1⌉ − s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionCheck {
    pub penalty: f64,
    pub budget: f64,
    pub holds: bool,
}

pub fn check_solution_penalty(
    model: &PenaltyModel,
    xhat: &[f64],
    delta_q: f64,
    s: usize,
) -> Result<SolutionCheck, AnalysisError> {
    if !(delta_q.is_finite() && delta_q >= 1.0) {
        return Err(AnalysisError::Input(format!(
            "delta_q must be finite and at least 1, got {delta_q}"
        )));
    }
    let penalty = model.penalty(xhat)?;
    let budget = (delta_q - 1.0).ceil() - s as f64;
    Ok(SolutionCheck {
        penalty,
        budget,
        holds: penalty <= budget,
    })
}

pub fn recovery_bound(
    delta_q: f64,
    q: f64,
    n: usize,
    model: &PenaltyModel,
    s: usize,
) -> Result<BoundReport, AnalysisError> {
    validate_q(q)?;
    if n == 0 {
        return Err(AnalysisError::Input("N must be positive".into()));
    }
    // ‖v‖₁ ≥ ‖v‖_q forces Δ ≥ 1 for every kernel
    if !(delta_q.is_finite() && delta_q >= 1.0) {
        return Err(AnalysisError::Input(format!(
            "delta_q must be finite and at least 1, got {delta_q}"
        )));
    }
    let (power, s_factor) = if q.is_infinite() {
        (1.0, 0.5)
    } else {
        (1.0 - 1.0 / q, 2.0_f64.powf(q / (1.0 - q)))
    };
    let denominator = delta_q.powf(power) - (delta_q - 1.0).ceil().powf(power);
    if !(denominator > 0.0) {
        return Err(AnalysisError::DegenerateBound {
            delta_q,
            denominator,
        });
    }
    let alpha_theta = model.inverse_cdf(1.0 - 1.0 / n as f64)?;
    let s_max = s_factor * delta_q;
    Ok(BoundReport {
        delta_q,
        q,
        n,
        s,
        model: model.to_string(),
        alpha_theta,
        s_max,
        bound_value: n as f64 * alpha_theta / denominator,
        sparsity_condition: (s as f64) < s_max,
        solution: None,
    })
}
