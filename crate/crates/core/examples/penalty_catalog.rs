//! Every density in the catalog: its parameters, whether the induced penalty
//! is concave, and a few values of the density, CDF and quantile function.

use cdfreg::penalties::{Family, PenaltyModel};

fn main() {
    let models = [
        PenaltyModel::dirac(),
        PenaltyModel::uniform(2.0).unwrap(),
        PenaltyModel::scad(1.0, 3.7).unwrap(),
        PenaltyModel::mcp(1.0, 3.0).unwrap(),
        PenaltyModel::u_quadratic(1.0).unwrap(),
        PenaltyModel::exponential(1.0).unwrap(),
        PenaltyModel::rayleigh(1.0).unwrap(),
        PenaltyModel::weibull(0.5, 1.0).unwrap(),
        PenaltyModel::chi_squared(1.0).unwrap(),
        PenaltyModel::generalized_gamma(1.0, 0.5, 1.0).unwrap(),
        PenaltyModel::generalized_beta_prime(1.0, 1.0, 1.0, 1.0).unwrap(),
        PenaltyModel::folded_normal(1.0).unwrap(),
        PenaltyModel::folded_student_t(3.0).unwrap(),
        PenaltyModel::folded_cauchy(),
    ];
    assert_eq!(models.len(), Family::ALL.len());

    println!(
        "{:<44} {:>11} {:>10} {:>10} {:>10}",
        "model", "concavity", "pdf(0.5)", "cdf(0.5)", "median"
    );
    for m in &models {
        let median = match m.inverse_cdf(0.5) {
            Ok(t) => format!("{t:.4}"),
            Err(_) => "-".into(),
        };
        // the Dirac model has no density
        let pdf = m
            .pdf(0.5)
            .map(|v| format!("{v:.4}"))
            .unwrap_or_else(|_| "-".into());
        println!(
            "{:<44} {:>11} {:>10} {:>10.4} {:>10}",
            m.to_string(),
            format!("{:?}", m.concavity()),
            pdf,
            m.cdf(0.5).unwrap(),
            median
        );
    }

    // models also parse from text
    let m: PenaltyModel = "weibull(k=0.5, sigma=2)".parse().unwrap();
    let x = [0.0, 0.3, -1.5, 4.0];
    println!("\n{m}: J({x:?}) = {:.6}", m.penalty(&x).unwrap());
}
