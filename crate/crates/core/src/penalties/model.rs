use std::f64::consts::{FRAC_2_PI, PI, SQRT_2};
use std::fmt;

use statrs::function::beta::{beta_reg, ln_beta};
use statrs::function::erf::{erf, erf_inv};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use super::family::{Concavity, Family};
use super::PenaltyError;

/// Default additive smoothing for IRL1 weights, `w = f(|x| + eps)`.
pub const DEFAULT_WEIGHT_EPS: f64 = 1e-8;

/// A distribution family together with a validated parameter vector.
///
/// Models are immutable; every evaluation is a pure function of the model
/// and its inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyModel {
    family: Family,
    params: Vec<f64>,
}

impl PenaltyModel {
    /// Builds a model from parameters given in [`Family::param_names`] order.
    pub fn new(family: Family, params: &[f64]) -> Result<Self, PenaltyError> {
        let names = family.param_names();
        if params.len() != names.len() {
            return Err(PenaltyError::ParamCount {
                family,
                expected: names.len(),
                got: params.len(),
            });
        }
        for (&name, &value) in names.iter().zip(params) {
            let ok = value.is_finite()
                && match (family, name) {
                    (Family::ScadLinear, "gamma") => value > 1.0,
                    _ => value > 0.0,
                };
            if !ok {
                let constraint = match (family, name) {
                    (Family::ScadLinear, "gamma") => "finite and > 1",
                    _ => "finite and > 0",
                };
                return Err(PenaltyError::InvalidParam {
                    family,
                    name,
                    value,
                    constraint,
                });
            }
        }
        Ok(Self {
            family,
            params: params.to_vec(),
        })
    }

    pub fn dirac() -> Self {
        Self {
            family: Family::DiracDelta,
            params: Vec::new(),
        }
    }

    pub fn uniform(gamma: f64) -> Result<Self, PenaltyError> {
        Self::new(Family::Uniform, &[gamma])
    }

    pub fn scad(lam: f64, gamma: f64) -> Result<Self, PenaltyError> {
        Self::new(Family::ScadLinear, &[lam, gamma])
    }

    pub fn mcp(lam: f64, gamma: f64) -> Result<Self, PenaltyError> {
        Self::new(Family::McpLinear, &[lam, gamma])
    }

    pub fn u_quadratic(b: f64) -> Result<Self, PenaltyError> {
        Self::new(Family::UQuadratic, &[b])
    }

    pub fn exponential(sigma: f64) -> Result<Self, PenaltyError> {
        Self::new(Family::Exponential, &[sigma])
    }

    pub fn rayleigh(sigma: f64) -> Result<Self, PenaltyError> {
        Self::new(Family::Rayleigh, &[sigma])
    }

    pub fn weibull(k: f64, sigma: f64) -> Result<Self, PenaltyError> {
        Self::new(Family::Weibull, &[k, sigma])
    }

    pub fn chi_squared(k: f64) -> Result<Self, PenaltyError> {
        Self::new(Family::ChiSquared, &[k])
    }

    pub fn generalized_gamma(a: f64, d: f64, p: f64) -> Result<Self, PenaltyError> {
        Self::new(Family::GeneralizedGamma, &[a, d, p])
    }

    pub fn generalized_beta_prime(
        p: f64,
        q: f64,
        alpha: f64,
        beta: f64,
    ) -> Result<Self, PenaltyError> {
        Self::new(Family::GeneralizedBetaPrime, &[p, q, alpha, beta])
    }

    pub fn folded_normal(sigma: f64) -> Result<Self, PenaltyError> {
        Self::new(Family::FoldedNormal, &[sigma])
    }

    pub fn folded_student_t(nu: f64) -> Result<Self, PenaltyError> {
        Self::new(Family::FoldedStudentT, &[nu])
    }

    pub fn folded_cauchy() -> Self {
        Self {
            family: Family::FoldedCauchy,
            params: Vec::new(),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Looks up a parameter by name.
    pub fn param(&self, name: &str) -> Option<f64> {
        self.family
            .param_names()
            .iter()
            .position(|&n| n == name)
            .map(|i| self.params[i])
    }

    /// Returns a copy with one parameter replaced, re-validated.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self, PenaltyError> {
        let idx = self
            .family
            .param_names()
            .iter()
            .position(|&n| n == name)
            .ok_or_else(|| PenaltyError::UnknownParam {
                family: self.family,
                name: name.to_string(),
            })?;
        let mut params = self.params.clone();
        params[idx] = value;
        Self::new(self.family, &params)
    }

    /// Concavity of `F` on `[0, ∞)`, decided from the sign of `f'`.
    pub fn concavity(&self) -> Concavity {
        let p = &self.params;
        let concave = match self.family {
            Family::UQuadratic | Family::Rayleigh => false,
            Family::Weibull | Family::ChiSquared => p[0] <= 1.0,
            Family::GeneralizedGamma => p[1] <= 1.0,
            Family::GeneralizedBetaPrime => p[2] * p[0] <= 1.0,
            _ => true,
        };
        if concave {
            Concavity::Concave
        } else {
            Concavity::NotConcave
        }
    }

    /// Right end of a bounded support, if any.
    pub fn support_end(&self) -> Option<f64> {
        let p = &self.params;
        match self.family {
            Family::Uniform => Some(p[0]),
            Family::ScadLinear => Some(p[0] * p[1]),
            Family::McpLinear => Some(p[0] * p[1]),
            Family::UQuadratic => Some(p[0]),
            _ => None,
        }
    }

    /// True when `f(t) → ∞` as `t → 0⁺`.
    pub fn pdf_diverges_at_zero(&self) -> bool {
        let p = &self.params;
        match self.family {
            Family::Weibull | Family::ChiSquared => p[0] < 1.0,
            Family::GeneralizedGamma => p[1] < 1.0,
            Family::GeneralizedBetaPrime => p[2] * p[0] < 1.0,
            _ => false,
        }
    }

    /// Density `f(t)`. Returns `+∞` at `t = 0` for families whose density
    /// diverges there.
    pub fn pdf(&self, t: f64) -> Result<f64, PenaltyError> {
        check_arg(t)?;
        if self.family == Family::DiracDelta {
            return Err(PenaltyError::Unsupported {
                family: self.family,
                operation: "pdf",
            });
        }
        Ok(self.pdf_raw(t))
    }

    fn pdf_raw(&self, t: f64) -> f64 {
        let p = &self.params;
        match self.family {
            Family::DiracDelta => unreachable!("dirac has no density"),
            Family::Uniform => {
                if t <= p[0] {
                    1.0 / p[0]
                } else {
                    0.0
                }
            }
            Family::ScadLinear => {
                let (lam, gamma) = (p[0], p[1]);
                let ramp = 1.0 - (t - lam) / (lam * (gamma - 1.0));
                2.0 / (lam * (gamma + 1.0)) * ramp.clamp(0.0, 1.0)
            }
            Family::McpLinear => {
                let b = p[0] * p[1];
                2.0 / b * (1.0 - t / b).max(0.0)
            }
            Family::UQuadratic => {
                let b = p[0];
                if t > b {
                    0.0
                } else {
                    let (alpha, beta) = u_quadratic_coeffs(b);
                    alpha * (t - beta).powi(2)
                }
            }
            Family::Exponential => (-t / p[0]).exp() / p[0],
            Family::Rayleigh => {
                let s2 = p[0] * p[0];
                t / s2 * (-t * t / (2.0 * s2)).exp()
            }
            Family::Weibull => {
                let (k, sigma) = (p[0], p[1]);
                if t == 0.0 {
                    return power_at_zero(k, k / sigma);
                }
                let z = t / sigma;
                k / sigma * z.powf(k - 1.0) * (-z.powf(k)).exp()
            }
            Family::ChiSquared => {
                let k = p[0];
                let norm = (k / 2.0 - 1.0) * 2f64.ln() + ln_gamma(k / 2.0);
                if t == 0.0 {
                    return power_at_zero(k, (-norm).exp());
                }
                ((k - 1.0) * t.ln() - t * t / 2.0 - norm).exp()
            }
            Family::GeneralizedGamma => {
                let (a, d, pp) = (p[0], p[1], p[2]);
                let log_norm = pp.ln() - d * a.ln() - ln_gamma(d / pp);
                if t == 0.0 {
                    return power_at_zero(d, log_norm.exp());
                }
                (log_norm + (d - 1.0) * t.ln() - (t / a).powf(pp)).exp()
            }
            Family::GeneralizedBetaPrime => {
                let (pp, q, alpha, beta) = (p[0], p[1], p[2], p[3]);
                let log_norm = pp.ln() - q.ln() - ln_beta(alpha, beta);
                if t == 0.0 {
                    return power_at_zero(alpha * pp, log_norm.exp());
                }
                let z = t / q;
                let log_zp = pp * z.ln();
                (log_norm + (alpha * pp - 1.0) * z.ln() - (alpha + beta) * ln_1p_exp(log_zp)).exp()
            }
            Family::FoldedNormal => {
                let s = p[0];
                2.0 / ((2.0 * PI).sqrt() * s) * (-t * t / (2.0 * s * s)).exp()
            }
            Family::FoldedStudentT => {
                let nu = p[0];
                let log_norm = 2f64.ln() + ln_gamma((nu + 1.0) / 2.0)
                    - 0.5 * (nu * PI).ln()
                    - ln_gamma(nu / 2.0);
                (log_norm - (nu + 1.0) / 2.0 * (t * t / nu).ln_1p()).exp()
            }
            Family::FoldedCauchy => FRAC_2_PI / (1.0 + t * t),
        }
    }

    /// Cumulative distribution `F(t)`, the scalar penalty.
    pub fn cdf(&self, t: f64) -> Result<f64, PenaltyError> {
        check_arg(t)?;
        Ok(self.cdf_raw(t))
    }

    pub(crate) fn cdf_raw(&self, t: f64) -> f64 {
        let p = &self.params;
        let value = match self.family {
            Family::DiracDelta => {
                if t > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Family::Uniform => (t / p[0]).min(1.0),
            Family::ScadLinear => {
                let (lam, gamma) = (p[0], p[1]);
                let c = 2.0 / (lam * (gamma + 1.0));
                if t <= lam {
                    c * t
                } else if t < gamma * lam {
                    let u = t - lam;
                    c * (t - u * u / (2.0 * lam * (gamma - 1.0)))
                } else {
                    1.0
                }
            }
            Family::McpLinear => {
                let b = p[0] * p[1];
                if t >= b {
                    1.0
                } else {
                    let r = 1.0 - t / b;
                    1.0 - r * r
                }
            }
            Family::UQuadratic => {
                let b = p[0];
                if t >= b {
                    1.0
                } else {
                    let (alpha, beta) = u_quadratic_coeffs(b);
                    alpha / 3.0 * ((t - beta).powi(3) + beta.powi(3))
                }
            }
            Family::Exponential => -(-t / p[0]).exp_m1(),
            Family::Rayleigh => -(-t * t / (2.0 * p[0] * p[0])).exp_m1(),
            Family::Weibull => -(-(t / p[1]).powf(p[0])).exp_m1(),
            Family::ChiSquared => {
                if t == 0.0 {
                    0.0
                } else {
                    gamma_lr(p[0] / 2.0, t * t / 2.0)
                }
            }
            Family::GeneralizedGamma => {
                if t == 0.0 {
                    0.0
                } else {
                    gamma_lr(p[1] / p[2], (t / p[0]).powf(p[2]))
                }
            }
            Family::GeneralizedBetaPrime => {
                let (pp, q, alpha, beta) = (p[0], p[1], p[2], p[3]);
                if t == 0.0 {
                    0.0
                } else {
                    let zp = (t / q).powf(pp);
                    if zp.is_infinite() {
                        1.0
                    } else if zp <= 1.0 {
                        beta_reg(alpha, beta, zp / (1.0 + zp))
                    } else {
                        1.0 - beta_reg(beta, alpha, 1.0 / (1.0 + zp))
                    }
                }
            }
            Family::FoldedNormal => erf(t / (SQRT_2 * p[0])),
            Family::FoldedStudentT => {
                let nu = p[0];
                if t == 0.0 {
                    0.0
                } else if t * t <= nu {
                    beta_reg(0.5, nu / 2.0, t * t / (nu + t * t))
                } else {
                    1.0 - beta_reg(nu / 2.0, 0.5, nu / (nu + t * t))
                }
            }
            Family::FoldedCauchy => FRAC_2_PI * t.atan(),
        };
        value.clamp(0.0, 1.0)
    }

    /// Quantile `F⁻¹(prob)` for `prob ∈ [0, 1)`, i.e. the smallest `t` with
    /// `F(t) ≥ prob`.
    pub fn inverse_cdf(&self, prob: f64) -> Result<f64, PenaltyError> {
        if !(0.0..1.0).contains(&prob) {
            return Err(PenaltyError::Probability(prob));
        }
        if prob == 0.0 {
            return Ok(0.0);
        }
        let p = &self.params;
        let t = match self.family {
            Family::DiracDelta => 0.0,
            Family::Uniform => prob * p[0],
            Family::ScadLinear => {
                let (lam, gamma) = (p[0], p[1]);
                let c = 2.0 / (lam * (gamma + 1.0));
                if prob <= c * lam {
                    prob / c
                } else {
                    // F = c(λ + u - u²/(2g)) with u = t - λ, g = λ(γ-1).
                    let g = lam * (gamma - 1.0);
                    let disc = (1.0 - 2.0 * (prob / c - lam) / g).max(0.0);
                    lam + g * (1.0 - disc.sqrt())
                }
            }
            Family::McpLinear => p[0] * p[1] * (1.0 - (1.0 - prob).sqrt()),
            Family::UQuadratic => {
                let (alpha, beta) = u_quadratic_coeffs(p[0]);
                beta + (3.0 * prob / alpha - beta.powi(3)).cbrt()
            }
            Family::Exponential => -p[0] * (-prob).ln_1p(),
            Family::Rayleigh => p[0] * (-2.0 * (-prob).ln_1p()).sqrt(),
            Family::Weibull => p[1] * (-(-prob).ln_1p()).powf(1.0 / p[0]),
            Family::FoldedNormal => SQRT_2 * p[0] * erf_inv(prob),
            Family::FoldedCauchy => (prob / FRAC_2_PI).tan(),
            Family::ChiSquared
            | Family::GeneralizedGamma
            | Family::GeneralizedBetaPrime
            | Family::FoldedStudentT => self.bisect_quantile(prob),
        };
        Ok(t.max(0.0))
    }

    fn bisect_quantile(&self, prob: f64) -> f64 {
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.cdf_raw(hi) < prob {
            lo = hi;
            hi *= 2.0;
            if hi.is_infinite() {
                return f64::MAX;
            }
        }
        for _ in 0..4000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf_raw(mid) < prob {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if (self.cdf_raw(lo) - prob).abs() < (self.cdf_raw(hi) - prob).abs() {
            lo
        } else {
            hi
        }
    }

    /// Separable penalty `J(x) = Σ_j F(|x_j|)`.
    pub fn penalty(&self, x: &[f64]) -> Result<f64, PenaltyError> {
        if let Some(&bad) = x.iter().find(|v| !v.is_finite()) {
            return Err(PenaltyError::NonFinite(bad));
        }
        Ok(self.penalty_unchecked(x))
    }

    pub(crate) fn penalty_unchecked(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| self.cdf_raw(v.abs())).sum()
    }

    /// IRL1 weight `f(t + eps)`: the slope of the tangent that linearizes
    /// the penalty at magnitude `t`.
    pub fn irl1_weight(&self, t: f64, eps: f64) -> Result<f64, PenaltyError> {
        check_arg(t)?;
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(PenaltyError::Domain(eps));
        }
        if self.family == Family::DiracDelta {
            return Err(PenaltyError::Unsupported {
                family: self.family,
                operation: "irl1_weight",
            });
        }
        let arg = t + eps;
        if arg == 0.0 && self.pdf_diverges_at_zero() {
            return Err(PenaltyError::Singularity {
                family: self.family,
            });
        }
        Ok(self.pdf_raw(arg))
    }

    /// `F(t) / F(1)` over `grid`, normalizing every curve through `(1, 1)`.
    pub fn scaled_penalty_curve(&self, grid: &[f64]) -> Result<Vec<f64>, PenaltyError> {
        let scale = self.cdf_raw(1.0);
        if scale <= 0.0 {
            return Err(PenaltyError::DegenerateScale);
        }
        grid.iter().map(|&t| Ok(self.cdf(t)? / scale)).collect()
    }
}

impl fmt::Display for PenaltyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.family.name())?;
        for (i, (name, value)) in self
            .family
            .param_names()
            .iter()
            .zip(&self.params)
            .enumerate()
        {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{name}={value}")?;
        }
        f.write_str(")")
    }
}

fn check_arg(t: f64) -> Result<(), PenaltyError> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(PenaltyError::Domain(t))
    }
}

/// Value at `t = 0` of `c · t^(exponent - 1) · (bounded factor → 1)`.
fn power_at_zero(exponent: f64, c: f64) -> f64 {
    if exponent < 1.0 {
        f64::INFINITY
    } else if exponent == 1.0 {
        c
    } else {
        0.0
    }
}

/// Coefficients `(α, β)` of the U-quadratic density `α (t - β)²` on `[0, b]`.
fn u_quadratic_coeffs(b: f64) -> (f64, f64) {
    (12.0 / b.powi(3), b / 2.0)
}

/// `ln(1 + e^v)` without overflow.
fn ln_1p_exp(v: f64) -> f64 {
    if v > 35.0 {
        v
    } else {
        v.exp().ln_1p()
    }
}
