use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{trial_problem, trial_seed, ExperimentConfig, HarnessError};
use crate::solvers::{L1Pass, Regularizer, SolveResult, SolverError};

/// Outcome of one penalty on one replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub penalty: String,
    pub s: usize,
    pub replicate: usize,
    pub seed: u64,
    pub rel_error: f64,
    pub success: bool,
    pub outer_iters: usize,
    /// Seconds; zero unless wall time recording is enabled.
    pub wall_time: f64,
    /// False when the solver hit an iteration cap or failed outright.
    #[serde(skip)]
    pub converged: bool,
}

/// Runs every penalty on every `(s, replicate)` cell. All penalties of a
/// cell share one problem and one unit-weight lasso pass. Records come back
/// ordered by penalty (config order), then `s` (grid order), then replicate.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>, HarnessError> {
    cfg.validate()?;
    let regs = cfg.regularizers()?;
    let cells: Vec<(usize, usize, usize)> = cfg
        .sparsity_grid
        .iter()
        .enumerate()
        .flat_map(|(si, &s)| (0..cfg.replicates).map(move |r| (si, s, r)))
        .collect();

    let run = |&(si, s, rep): &(usize, usize, usize)| {
        run_cell(cfg, &regs, s, rep).map(|recs| (si, rep, recs))
    };
    let per_cell: Vec<_> = if cfg.parallel {
        cells.par_iter().map(run).collect::<Result<_, _>>()?
    } else {
        cells.iter().map(run).collect::<Result<_, _>>()?
    };

    let mut keyed: Vec<(usize, usize, usize, TrialRecord)> = per_cell
        .into_iter()
        .flat_map(|(si, rep, recs)| {
            recs.into_iter()
                .enumerate()
                .map(move |(pi, rec)| (pi, si, rep, rec))
        })
        .collect();
    keyed.sort_by_key(|&(pi, si, rep, _)| (pi, si, rep));
    Ok(keyed.into_iter().map(|(.., rec)| rec).collect())
}

fn run_cell(
    cfg: &ExperimentConfig,
    regs: &[Regularizer],
    s: usize,
    rep: usize,
) -> Result<Vec<TrialRecord>, HarnessError> {
    let seed = trial_seed(cfg.master_seed, s, rep);
    let problem = trial_problem(cfg.n, cfg.m, s, seed, cfg.magnitudes, cfg.matrix_scaling)?;
    let irl1 = cfg.irl1_config();

    let start = Instant::now();
    let pass = L1Pass::run(&problem, cfg.lambda, &cfg.solver.admm);
    let pass_time = start.elapsed().as_secs_f64();

    let record = |reg: &Regularizer, outcome: Result<SolveResult, SolverError>, secs: f64| {
        let (rel_error, outer_iters, converged) = match outcome {
            Ok(res) => (
                problem.relative_error(&res.xhat).unwrap_or(f64::INFINITY),
                res.outer_iters,
                res.converged,
            ),
            Err(_) => (f64::INFINITY, 0, false),
        };
        TrialRecord {
            penalty: reg.to_string(),
            s,
            replicate: rep,
            seed,
            rel_error,
            success: rel_error <= cfg.success_tol,
            outer_iters,
            wall_time: if cfg.record_wall_time { secs } else { 0.0 },
            converged,
        }
    };

    let records = match &pass {
        Ok(pass) => regs
            .iter()
            .map(|reg| {
                let t = Instant::now();
                let outcome = reg.solve_from_pass(pass, &irl1);
                record(reg, outcome, pass_time + t.elapsed().as_secs_f64())
            })
            .collect(),
        Err(e) => regs
            .iter()
            .map(|reg| record(reg, Err(SolverError::Config(e.to_string())), pass_time))
            .collect(),
    };
    Ok(records)
}

/// Fraction of successful records for one penalty at one sparsity. The
/// penalty is matched after normalizing its specification.
pub fn success_rate(
    records: &[TrialRecord],
    penalty_spec: &str,
    s: usize,
) -> Result<f64, HarnessError> {
    let key = penalty_spec
        .parse::<Regularizer>()
        .map(|r| r.to_string())
        .unwrap_or_else(|_| penalty_spec.trim().to_string());
    let (hits, total) = records
        .iter()
        .filter(|r| r.s == s && r.penalty == key)
        .fold((0usize, 0usize), |(h, t), r| {
            (h + r.success as usize, t + 1)
        });
    if total == 0 {
        return Err(HarnessError::NoRecords { penalty: key, s });
    }
    Ok(hits as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(penalty: &str, s: usize, success: bool) -> TrialRecord {
        TrialRecord {
            penalty: penalty.into(),
            s,
            replicate: 0,
            seed: 0,
            rel_error: if success { 0.0 } else { 1.0 },
            success,
            outer_iters: 1,
            wall_time: 0.0,
            converged: true,
        }
    }

    #[test]
    fn rates() {
        let mut recs: Vec<_> = (0..73).map(|_| rec("l1", 6, true)).collect();
        recs.extend((0..27).map(|_| rec("l1", 6, false)));
        assert!((success_rate(&recs, "l1", 6).unwrap() - 0.73).abs() < 1e-15);
        assert!(success_rate(&recs, "l1", 8).is_err());
        let w = vec![rec("weibull(k=1,sigma=1)", 6, true)];
        assert_eq!(
            success_rate(&w, "weibull( k = 1.0, sigma = 1 )", 6).unwrap(),
            1.0
        );
    }

    #[test]
    fn single_cell_sweep() {
        let cfg = ExperimentConfig {
            n: 40,
            m: 20,
            sparsity_grid: vec![3],
            replicates: 1,
            penalties: vec!["l1".into()],
            ..ExperimentConfig::default()
        };
        let recs = run_sweep(&cfg).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(recs[0].success);
        assert_eq!(recs[0].wall_time, 0.0);
    }
}
