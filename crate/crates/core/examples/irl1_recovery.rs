//! One compressed-sensing trial: a 20-sparse signal in R^256 from 64
//! Gaussian measurements, recovered with plain l1 and with IRL1 under a few
//! Weibull penalties.

use cdfreg::harness::{trial_problem, Magnitudes, MatrixScaling};
use cdfreg::solvers::{AdmmConfig, Irl1Config, Regularizer};

fn main() {
    let problem = trial_problem(
        256,
        64,
        20,
        7,
        Magnitudes::Gaussian,
        MatrixScaling::InverseRows,
    )
    .unwrap();
    let irl1 = Irl1Config {
        lambda: 1e-7,
        ..Irl1Config::default()
    };
    let admm = AdmmConfig::default();

    println!(
        "{:<28} {:>12} {:>6} {:>8} {:>10}",
        "penalty", "rel. error", "outer", "inner", "converged"
    );
    for spec in [
        "l1",
        "weibull(k=1,sigma=1)",
        "weibull(k=0.5,sigma=1)",
        "weibull(k=1,sigma=100)",
        "exp(sigma=0.5)",
    ] {
        let reg: Regularizer = spec.parse().unwrap();
        let res = reg.solve(&problem, &irl1, &admm).unwrap();
        println!(
            "{:<28} {:>12.3e} {:>6} {:>8} {:>10}",
            reg.to_string(),
            problem.relative_error(&res.xhat).unwrap(),
            res.outer_iters,
            res.total_inner_iters,
            res.converged
        );
    }
}
