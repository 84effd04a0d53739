use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::AnalysisError;
use crate::penalties::{Family, PenaltyError, PenaltyModel};

/// Largest `n` evaluated through the alternating sum; beyond it the
/// cancellation gets too severe and a normal approximation is used.
const EXACT_MAX_N: usize = 30;

/// Kolmogorov–Smirnov critical constant at the 5% level.
const KS_5PCT: f64 = 1.36;

/// CDF of the sum of `n` independent `U[0, 1]` variables.
pub fn irwin_hall_cdf(n: usize, x: f64) -> f64 {
    if n == 0 {
        return if x >= 0.0 { 1.0 } else { 0.0 };
    }
    let nf = n as f64;
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 0.0;
    }
    if x >= nf {
        return 1.0;
    }
    if n > EXACT_MAX_N {
        let normal = Normal::new(nf / 2.0, (nf / 12.0).sqrt()).expect("valid normal");
        return normal.cdf(x);
    }
    // the lower tail has fewer, smaller terms
    if x > nf / 2.0 {
        return 1.0 - irwin_hall_cdf(n, nf - x);
    }
    let mut sum = 0.0;
    let mut binom = 1.0;
    for k in 0..=(x.floor() as usize) {
        let term = binom * (x - k as f64).powi(n as i32);
        sum += if k % 2 == 0 { term } else { -term };
        binom = binom * (nf - k as f64) / (k as f64 + 1.0);
    }
    let fact: f64 = (1..=n).map(|i| i as f64).product();
    (sum / fact).clamp(0.0, 1.0)
}

/// `1.36 / √samples`.
pub fn ks_critical_value(samples: usize) -> f64 {
    KS_5PCT / (samples as f64).sqrt()
}

/// Empirical law of `J(x)` for random signals with i.i.d. magnitudes drawn
/// from the model's own density, against Irwin–Hall(n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrwinHallStats {
    pub model: String,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub mean: f64,
    pub variance: f64,
    pub expected_mean: f64,
    pub expected_variance: f64,
    pub ks_distance: f64,
    pub ks_critical: f64,
}

pub fn irwin_hall_check(
    model: &PenaltyModel,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<IrwinHallStats, AnalysisError> {
    if model.family() == Family::DiracDelta {
        return Err(PenaltyError::Unsupported {
            family: Family::DiracDelta,
            operation: "sampling",
        }
        .into());
    }
    if n == 0 || samples < 2 {
        return Err(AnalysisError::Input(format!(
            "need n >= 1 and samples >= 2, got n = {n}, samples = {samples}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; n];
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        for xi in x.iter_mut() {
            let u: f64 = rng.random();
            *xi = model.inverse_cdf(u)?;
        }
        values.push(model.penalty(&x)?);
    }

    let m = samples as f64;
    let mean = values.iter().sum::<f64>() / m;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    values.sort_by(f64::total_cmp);
    let ks_distance = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = irwin_hall_cdf(n, v);
            (f - i as f64 / m).max((i + 1) as f64 / m - f)
        })
        .fold(0.0, f64::max);

    Ok(IrwinHallStats {
        model: model.to_string(),
        n,
        samples,
        seed,
        mean,
        variance,
        expected_mean: n as f64 / 2.0,
        expected_variance: n as f64 / 12.0,
        ks_distance,
        ks_critical: ks_critical_value(samples),
    })
}
