//! The penalty of a signal drawn from the penalty's own density is a sum of
//! N independent uniforms. Compare sample moments and the KS distance for a
//! few densities. With one seed every density would report the same
//! numbers, since F(F⁻¹(U)) = U.

use cdfreg::analysis::{irwin_hall_cdf, irwin_hall_check};
use cdfreg::penalties::PenaltyModel;

fn main() {
    let n = 12;
    println!(
        "Irwin-Hall({n}) CDF at 4, 6, 8: {:.5} {:.5} {:.5}\n",
        irwin_hall_cdf(n, 4.0),
        irwin_hall_cdf(n, 6.0),
        irwin_hall_cdf(n, 8.0)
    );
    println!(
        "{:<32} {:>8} {:>9} {:>9} {:>9}",
        "model", "mean", "variance", "KS", "critical"
    );
    for (seed, spec) in [
        "exp(sigma=1)",
        "weibull(k=0.3,sigma=2)",
        "rayleigh(sigma=5)",
        "cauchy",
        "scad(lam=1,gamma=3.7)",
    ]
    .into_iter()
    .enumerate()
    {
        let model: PenaltyModel = spec.parse().unwrap();
        let st = irwin_hall_check(&model, n, 100_000, seed as u64).unwrap();
        println!(
            "{:<32} {:>8.4} {:>9.4} {:>9.5} {:>9.5}",
            st.model, st.mean, st.variance, st.ks_distance, st.ks_critical
        );
    }
}
