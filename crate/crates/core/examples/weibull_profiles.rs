//! Shapes of the Weibull penalty: the normalized curve F(t)/F(1) over a
//! range of shapes and scales, and the IRL1 weights the solver would use.

use cdfreg::penalties::{PenaltyModel, DEFAULT_WEIGHT_EPS};

fn main() {
    let grid: Vec<f64> = (0..=8).map(|i| i as f64 * 0.25).collect();
    let header: Vec<String> = grid.iter().map(|t| format!("{t:>6.2}")).collect();

    println!("F(t)/F(1)");
    println!("{:<18}{}", "k, sigma", header.join(""));
    for (k, sigma) in [
        (0.01, 1.0),
        (0.2, 1.0),
        (0.5, 1.0),
        (1.0, 1.0),
        (1.0, 0.01),
        (1.0, 100.0),
        (2.0, 1.0),
    ] {
        let curve = PenaltyModel::weibull(k, sigma)
            .unwrap()
            .scaled_penalty_curve(&grid)
            .unwrap();
        let row: Vec<String> = curve.iter().map(|v| format!("{v:>6.3}")).collect();
        println!("{:<18}{}", format!("{k}, {sigma}"), row.join(""));
    }

    println!("\nIRL1 weight f(t + eps)");
    println!("{:<18}{}", "k, sigma", header.join(""));
    for k in [0.2, 0.5, 1.0] {
        let m = PenaltyModel::weibull(k, 1.0).unwrap();
        let row: Vec<String> = grid
            .iter()
            .map(|&t| {
                format!(
                    "{:>6.2}",
                    m.irl1_weight(t, DEFAULT_WEIGHT_EPS).unwrap().min(999.0)
                )
            })
            .collect();
        println!("{:<18}{}", format!("{k}, 1"), row.join(""));
    }
}
