//! How a CDF-induced penalty measures a compressible signal x_j = j^-2
//! (N = 50) as its parameter moves: from counting every entry to almost
//! nothing.

use cdfreg::analysis::{sparsity_sweep, ThetaSweep};
use cdfreg::harness::compressible_signal;
use cdfreg::penalties::Family;

fn main() {
    let x = compressible_signal(50, 2.0);
    let thetas: Vec<f64> = (0..=12)
        .map(|i| 10f64.powf(-3.0 + 0.5 * i as f64))
        .collect();
    let sweeps = [
        (
            "exponential, rate",
            ThetaSweep::for_family(Family::Exponential).unwrap(),
        ),
        (
            "rayleigh, sigma",
            ThetaSweep::for_family(Family::Rayleigh).unwrap(),
        ),
        (
            "weibull k=1.5, sigma",
            ThetaSweep::parse("weibull(k=1.5)", false).unwrap(),
        ),
    ];

    print!("{:>10}", "theta");
    for (name, _) in &sweeps {
        print!("{name:>24}");
    }
    println!();
    let columns: Vec<Vec<f64>> = sweeps
        .iter()
        .map(|(_, s)| {
            sparsity_sweep(s, &thetas, &x)
                .into_iter()
                .map(Result::unwrap)
                .collect()
        })
        .collect();
    for (i, theta) in thetas.iter().enumerate() {
        print!("{theta:>10.3e}");
        for col in &columns {
            print!("{:>24.4}", col[i]);
        }
        println!();
    }
}
