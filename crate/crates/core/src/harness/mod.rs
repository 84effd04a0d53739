//! Seeded phase-transition experiments: random Gaussian measurements of
//! sparse signals, solved by every penalty of a sweep on identical data.

mod generate;
mod io;
mod sweep;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::penalties::DEFAULT_WEIGHT_EPS;
use crate::solvers::{check_irl1_model, AdmmConfig, Irl1Config, Regularizer};

pub use generate::{
    compressible_signal, gen_gaussian_matrix, gen_gaussian_matrix_with, gen_sparse_signal,
    gen_sparse_signal_with, mix64, trial_problem, trial_seed, Magnitudes, MatrixScaling,
};
pub use io::{
    read_config, read_records_csv, success_table, write_curve_csv, write_manifest,
    write_records_csv, write_success_csv, Manifest, RateRow, CRATE_VERSION,
};
pub use sweep::{run_sweep, success_rate, TrialRecord};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("no records for penalty {penalty} at s = {s}")]
    NoRecords { penalty: String, s: usize },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

/// IRL1 and ADMM settings shared by every trial. The regularization weight
/// lives on [`ExperimentConfig::lambda`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub max_outer: usize,
    pub weight_eps: f64,
    pub stop_tol: f64,
    pub admm: AdmmConfig,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let irl1 = Irl1Config::default();
        Self {
            max_outer: irl1.max_outer,
            weight_eps: DEFAULT_WEIGHT_EPS,
            stop_tol: irl1.stop_tol,
            admm: AdmmConfig::default(),
        }
    }
}

/// A sparsity sweep. Serialized field-for-field as the JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Signal length.
    #[serde(rename = "N", alias = "n")]
    pub n: usize,
    /// Number of measurements.
    pub m: usize,
    pub sparsity_grid: Vec<usize>,
    pub replicates: usize,
    pub lambda: f64,
    /// `"l1"` or penalty specifications such as `"weibull(k=0.5,sigma=1)"`.
    pub penalties: Vec<String>,
    /// A trial succeeds when `‖x̂ − x‖₂ / ‖x‖₂ ≤ success_tol`.
    pub success_tol: f64,
    pub master_seed: u64,
    pub magnitudes: Magnitudes,
    pub matrix_scaling: MatrixScaling,
    pub solver: SolverSettings,
    /// Run trials on the rayon thread pool.
    pub parallel: bool,
    /// Record per-solve wall-clock seconds. Off by default so that result
    /// files are byte-identical across runs.
    pub record_wall_time: bool,
}

/// The default penalty list: ℓ1 and the Weibull grid
/// `k ∈ {0.01, 0.2, 0.5, 0.8, 1} × σ ∈ {0.01, 1, 10, 100}`.
pub fn weibull_grid_penalties() -> Vec<String> {
    let mut out = vec!["l1".to_string()];
    for k in [0.01, 0.2, 0.5, 0.8, 1.0] {
        for sigma in [0.01, 1.0, 10.0, 100.0] {
            out.push(format!("weibull(k={k},sigma={sigma})"));
        }
    }
    out
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 256,
            m: 64,
            sparsity_grid: (6..=32).step_by(2).collect(),
            replicates: 100,
            lambda: 1e-7,
            penalties: weibull_grid_penalties(),
            success_tol: 1e-3,
            master_seed: 20_240_601,
            magnitudes: Magnitudes::default(),
            matrix_scaling: MatrixScaling::default(),
            solver: SolverSettings::default(),
            parallel: true,
            record_wall_time: false,
        }
    }
}

impl ExperimentConfig {
    pub fn irl1_config(&self) -> Irl1Config {
        Irl1Config {
            lambda: self.lambda,
            max_outer: self.solver.max_outer,
            eps: self.solver.weight_eps,
            stop_tol: self.solver.stop_tol,
        }
    }

    /// Parses and checks every penalty; returns them in config order.
    pub fn regularizers(&self) -> Result<Vec<Regularizer>, HarnessError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(self.penalties.len());
        for spec in &self.penalties {
            let reg: Regularizer = spec
                .parse()
                .map_err(|e| HarnessError::Config(format!("penalty '{spec}': {e}")))?;
            if let Regularizer::Cdf(model) = &reg {
                check_irl1_model(model)
                    .map_err(|e| HarnessError::Config(format!("penalty '{spec}': {e}")))?;
            }
            if !seen.insert(reg.to_string()) {
                return Err(HarnessError::Config(format!(
                    "penalty '{spec}' is listed twice"
                )));
            }
            out.push(reg);
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        if self.m == 0 || self.m >= self.n {
            return fail(format!(
                "need 0 < m < N, got m = {}, N = {}",
                self.m, self.n
            ));
        }
        if self.sparsity_grid.is_empty() {
            return fail("sparsity_grid is empty".into());
        }
        if let Some(s) = self.sparsity_grid.iter().find(|&&s| s == 0 || s > self.m) {
            return fail(format!("sparsity {s} must lie in 1..={}", self.m));
        }
        let distinct: BTreeSet<_> = self.sparsity_grid.iter().collect();
        if distinct.len() != self.sparsity_grid.len() {
            return fail("sparsity_grid has repeated values".into());
        }
        if self.replicates == 0 {
            return fail("replicates must be at least 1".into());
        }
        if !(self.success_tol > 0.0 && self.success_tol.is_finite()) {
            return fail(format!(
                "success_tol must be positive, got {}",
                self.success_tol
            ));
        }
        if self.penalties.is_empty() {
            return fail("penalties is empty".into());
        }
        self.irl1_config()
            .validate()
            .and_then(|_| self.solver.admm.validate())
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        self.regularizers().map(|_| ())
    }
}
